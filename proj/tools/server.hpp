#pragma once

#include <string>

#include "cavcool/service.hpp"

// Blocks serving the control service until the process is stopped.
int serve_http(cavcool::ControlService& service, const std::string& host, int port, const std::string& static_dir,
               bool quiet);
