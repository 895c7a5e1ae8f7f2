#include "server.hpp"

#include <httplib.h>

#include <iostream>

int serve_http(cavcool::ControlService& service, const std::string& host, int port, const std::string& static_dir,
               bool quiet) {
    httplib::Server svr;
    auto forward = [&service](const httplib::Request& req, httplib::Response& res) {
        std::map<std::string, std::string> query;
        for (const auto& [k, v] : req.params) query.emplace(k, v);
        const auto r = service.handle(req.method, req.path, req.body, query);
        res.status = r.status;
        res.set_content(r.body, r.content_type.c_str());
        res.set_header("Access-Control-Allow-Origin", "*");
    };
    svr.Get(R"(/sessions(/.*)?)", forward);
    svr.Post(R"(/sessions(/.*)?)", forward);
    svr.Delete(R"(/sessions(/.*)?)", forward);
    svr.Options(R"(/sessions(/.*)?)", [](const httplib::Request&, httplib::Response& res) {
        res.set_header("Access-Control-Allow-Origin", "*");
        res.set_header("Access-Control-Allow-Methods", "GET, POST, DELETE, OPTIONS");
        res.set_header("Access-Control-Allow-Headers", "Content-Type");
        res.status = 204;
    });
    if (!static_dir.empty() && !svr.set_mount_point("/", static_dir)) {
        std::cerr << "cavcool: static directory not found: " << static_dir << "\n";
        return 2;
    }
    if (!quiet) std::cerr << "cavcool: serving on http://" << host << ":" << port << "\n";
    if (!svr.listen(host.c_str(), port)) {
        std::cerr << "cavcool: cannot listen on " << host << ":" << port << "\n";
        return 1;
    }
    return 0;
}
