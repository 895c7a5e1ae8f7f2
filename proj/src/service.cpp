#include "cavcool/service.hpp"

#include <json.hpp>

#include "cavcool/export.hpp"
#include "cavcool/spectrum.hpp"

namespace cavcool {

using nlohmann::json;

namespace {

struct HttpError : Error {
    HttpError(int s, const std::string& what, std::string f = "") : Error(what), status(s), field(std::move(f)) {}
    int status;
    std::string field;
};

struct TransitionInfo {
    std::string label;
    std::size_t from = 0;
    std::size_t to = 0;
    double laser_offset = 0.0;  // rad/s
    double cavity_rate = 0.0;
    double spontaneous_rate = 0.0;
};

HttpReply reply(int status, const json& j) { return {status, j.dump(2) + "\n", "application/json"}; }

double hz(double w) { return rad_s_to_hz(w); }

}  // namespace

struct ControlService::Session {
    struct Frame {
        PopulationVector p;
        std::size_t trajectory_size = 0;
        std::size_t step_count = 0;
        double laser_offset = 0.0;
        std::optional<double> fsr;
    };

    std::string id;
    RunConfig cfg;
    std::shared_ptr<const CoolingModel> model;
    PopulationVector current;
    PopulationTrajectory trajectory;
    std::vector<ScheduleStep> steps;
    std::deque<Frame> undo;
    double laser_offset = 0.0;  // rad/s, current setting
    std::optional<double> fsr;  // current FSR override
    std::vector<TransitionInfo> transitions;
    std::mutex mutex;
};

ControlService::ControlService(ServiceOptions opt) : opt_(std::move(opt)) {}
ControlService::~ControlService() = default;

std::shared_ptr<ControlService::Session> ControlService::find(const std::string& id) {
    std::lock_guard<std::mutex> lock(mutex_);
    auto it = sessions_.find(id);
    if (it == sessions_.end()) throw HttpError(404, "unknown session '" + id + "'");
    return it->second;
}

namespace {

using Session = ControlService::Session;

json summary(const Session& s) {
    const auto& b = *s.model->basis();
    json pops = json::array();
    for (std::size_t i = 0; i < b.size(); ++i)
        pops.push_back({{"v", b.states[i].v},
                        {"J", b.states[i].J},
                        {"label", b.states[i].label()},
                        {"ladder", b.states[i].ladder == Ladder::even ? "even" : "odd"},
                        {"population", s.current.p[i]}});
    json history = json::array();
    for (std::size_t k = 0; k < s.trajectory.size(); ++k)
        history.push_back({{"time_ms", s.trajectory.times[k] * 1e3},
                           {"mean_J", s.trajectory.mean_J(k)},
                           {"mean_v", s.trajectory.mean_v(k)},
                           {"ground_fraction", s.trajectory.ground_fraction(k)},
                           {"step", s.trajectory.step_labels[k]}});
    json steps = json::array();
    for (const auto& st : s.steps) {
        json j = {{"target", st.target_text()}, {"duration_ms", st.duration * 1e3}};
        if (st.fsr_override) j["fsr_override_Hz"] = hz(*st.fsr_override);
        steps.push_back(j);
    }
    json trans = json::array();
    for (const auto& t : s.transitions)
        trans.push_back({{"label", t.label},
                         {"from", b.states[t.from].label()},
                         {"to", b.states[t.to].label()},
                         {"laser_offset_Hz", hz(t.laser_offset)},
                         {"cavity_rate", t.cavity_rate},
                         {"spontaneous_rate", t.spontaneous_rate},
                         {"source_population", s.current.p[t.from]}});
    json out = {{"id", s.id},
                {"molecule", s.cfg.molecule.name},
                {"time_ms", s.current.time * 1e3},
                {"populations", pops},
                {"mean_J", s.current.mean_J()},
                {"mean_v", s.current.mean_v()},
                {"ground_fraction", s.current.ground_fraction()},
                {"odd_fraction", s.current.odd_fraction()},
                {"laser_offset_Hz", hz(s.laser_offset)},
                {"fsr_Hz", hz(s.fsr.value_or(s.model->cavity().fsr))},
                {"kappa_Hz", hz(s.model->cavity().kappa)},
                {"default_duration_ms", s.cfg.step_duration * 1e3},
                {"undo_depth", s.undo.size()},
                {"history", history},
                {"steps", steps},
                {"transitions", trans}};
    return out;
}

std::string override_value(const json& v, const std::string& field) {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
    if (v.is_number_integer()) return std::to_string(v.get<long long>());
    if (v.is_number()) return format_double(v.get<double>());
    throw HttpError(400, "override values must be strings, numbers or booleans", field);
}

json parse_body(const std::string& body) {
    if (body.empty()) return json::object();
    try {
        json j = json::parse(body);
        if (!j.is_object()) throw HttpError(400, "request body must be a JSON object", "/");
        return j;
    } catch (const json::parse_error& e) {
        throw HttpError(400, std::string("malformed JSON: ") + e.what(), "/");
    }
}

std::shared_ptr<Session> create_session(const json& body, const ServiceOptions& opt, const std::string& id) {
    KeyValueFile kv;
    if (body.contains("config_text")) {
        if (!body["config_text"].is_string()) throw HttpError(400, "config_text must be a string", "/config_text");
        kv = KeyValueFile::parse(body["config_text"].get<std::string>(), "<request>");
    } else {
        std::string name = opt.default_config;
        if (body.contains("config")) {
            if (!body["config"].is_string()) throw HttpError(400, "config must be a string", "/config");
            name = body["config"].get<std::string>();
        }
        try {
            kv = KeyValueFile::load(resolve_config_path(name));
        } catch (const Error& e) {
            throw HttpError(400, e.what(), "/config");
        }
    }
    if (body.contains("overrides")) {
        const auto& o = body["overrides"];
        if (!o.is_object()) throw HttpError(400, "overrides must be an object", "/overrides");
        for (auto it = o.begin(); it != o.end(); ++it)
            kv.set(it.key(), override_value(it.value(), "/overrides/" + it.key()));
    }
    auto s = std::make_shared<Session>();
    s->id = id;
    try {
        s->cfg = parse_config(kv);
        s->model = std::make_shared<const CoolingModel>(build_model(s->cfg));
        s->current = initial_populations(s->cfg, *s->model);
    } catch (const Error& e) {
        throw HttpError(400, e.what(), "/overrides");
    }
    s->laser_offset = s->cfg.laser.detuning_offset;
    s->trajectory.basis = s->model->basis();
    s->trajectory.append(s->current, "initial");

    // Rates of every anti-Stokes line with the laser tuned onto it.
    const auto& b = *s->model->basis();
    for (const auto& [i, j] : anti_stokes_transitions(b)) {
        TransitionInfo t;
        t.from = i;
        t.to = j;
        t.label = transition_label(b.states[i], b.states[j]);
        t.laser_offset = detuning_for(b, i, j, s->model->cavity(), s->model->laser());
        const auto r = s->model->rates(t.laser_offset);
        t.cavity_rate = r.cavity(i, j);
        for (std::size_t k = 0; k < b.size(); ++k) t.spontaneous_rate += r.spont(i, k);
        s->transitions.push_back(t);
    }
    return s;
}

ScheduleStep parse_step(const json& body) {
    ScheduleStep st;
    if (body.contains("transition")) {
        if (!body["transition"].is_string()) throw HttpError(400, "transition must be a label string", "/transition");
        st.target = TransitionTarget::parse(body["transition"].get<std::string>());
        if (!st.target)
            throw HttpError(400, "transition label must look like v0-0:J3-1", "/transition");
    } else if (body.contains("offset_Hz")) {
        if (!body["offset_Hz"].is_number()) throw HttpError(400, "offset_Hz must be a number", "/offset_Hz");
        st.offset = hz_to_rad_s(body["offset_Hz"].get<double>());
    } else {
        throw HttpError(400, "step needs 'transition' or 'offset_Hz'", "/transition");
    }
    if (!body.contains("duration_ms") || !body["duration_ms"].is_number())
        throw HttpError(400, "duration_ms must be a number", "/duration_ms");
    st.duration = body["duration_ms"].get<double>() * 1e-3;
    if (!(st.duration > 0.0) || !std::isfinite(st.duration))
        throw HttpError(400, "duration_ms must be positive", "/duration_ms");
    if (body.contains("fsr_override_Hz")) {
        if (!body["fsr_override_Hz"].is_number() || !(body["fsr_override_Hz"].get<double>() > 0.0))
            throw HttpError(400, "fsr_override_Hz must be a positive number", "/fsr_override_Hz");
        st.fsr_override = hz_to_rad_s(body["fsr_override_Hz"].get<double>());
    }
    return st;
}

void apply_step(Session& s, const ScheduleStep& st, std::size_t depth) {
    StepSetting set;
    try {
        set = resolve_step(st, *s.model);
    } catch (const ForbiddenTransition& e) {
        throw HttpError(409, e.what(), "/transition");
    }
    RateOptions ro;
    ro.fsr_override = set.fsr;
    const auto m = generator(s.model->rates(set.laser_offset, 0.0, ro));
    check_generator(m);
    const Propagator prop(m, st.duration);

    s.undo.push_back({s.current, s.trajectory.size(), s.steps.size(), s.laser_offset, s.fsr});
    while (s.undo.size() > depth) s.undo.pop_front();
    prop.apply(s.current);
    s.trajectory.append(s.current, st.target_text());
    s.steps.push_back(st);
    s.laser_offset = set.laser_offset;
    s.fsr = set.fsr;
}

void truncate(PopulationTrajectory& t, std::size_t n) {
    t.times.resize(n);
    t.populations.resize(n);
    t.step_labels.resize(n);
    if (t.kinetic_energy.size() > n) t.kinetic_energy.resize(n);
}

ReducedSpectrum session_spectrum(const Session& s) {
    LaserSpec l = s.model->laser();
    l.detuning_offset = s.laser_offset;
    return fold(*s.model->basis(), s.model->cavity(), l, s.fsr);
}

json spectrum_json(const Session& s) {
    const auto sp = session_spectrum(s);
    const double kappa = s.model->cavity().kappa;
    json lines = json::array();
    for (const auto& l : sp.lines) {
        double d = l.folded_offset;
        if (d > 0.5 * sp.fsr) d -= sp.fsr;
        lines.push_back({{"label", l.label},
                         {"kind", to_string(l.kind)},
                         {"from", l.from_state.label()},
                         {"to", l.to_state.label()},
                         {"shift_Hz", hz(l.absolute_shift)},
                         {"folded_offset_Hz", hz(l.folded_offset)},
                         {"mode_detuning_Hz", hz(d)},
                         {"selectable", l.kind == LineKind::anti_stokes}});
    }
    json warnings = json::array();
    for (const auto* l : stokes_collisions(sp, kappa)) warnings.push_back(l->label);
    return {{"fsr_Hz", hz(sp.fsr)},
            {"laser_offset_Hz", hz(sp.laser_offset)},
            {"kappa_Hz", hz(kappa)},
            {"lines", lines},
            {"stokes_near_mode", warnings},
            {"table", export_spectrum(sp, kappa)}};
}

json rates_json(const Session& s) {
    RateOptions ro;
    ro.fsr_override = s.fsr;
    const auto t = s.model->rates(s.laser_offset, 0.0, ro);
    json labels = json::array();
    for (const auto& st : t.basis->states) labels.push_back(st.label());
    auto matrix = [&](const std::vector<double>& v) {
        json m = json::array();
        for (std::size_t i = 0; i < t.n; ++i)
            m.push_back(std::vector<double>(v.begin() + static_cast<std::ptrdiff_t>(i * t.n),
                                            v.begin() + static_cast<std::ptrdiff_t>((i + 1) * t.n)));
        return m;
    };
    return {{"laser_offset_Hz", hz(t.laser_offset)},
            {"fsr_Hz", hz(t.fsr)},
            {"states", labels},
            {"spontaneous", matrix(t.spontaneous)},
            {"cavity_plus", matrix(t.cavity_plus)},
            {"cavity_minus", matrix(t.cavity_minus)}};
}

std::vector<std::string> split_path(const std::string& path) {
    std::vector<std::string> parts;
    for (const auto& p : split(path, '/'))
        if (!p.empty()) parts.push_back(p);
    return parts;
}

}  // namespace

HttpReply ControlService::handle(const std::string& method, const std::string& path, const std::string& body,
                                 const std::map<std::string, std::string>& query) {
    try {
        const auto parts = split_path(path.substr(0, path.find('?')));
        if (parts.empty() || parts[0] != "sessions") throw HttpError(404, "no route for " + path);

        if (parts.size() == 1) {
            if (method == "POST") {
                const json j = parse_body(body);
                std::string id;
                {
                    std::lock_guard<std::mutex> lock(mutex_);
                    id = "s" + std::to_string(next_id_++);
                }
                auto s = create_session(j, opt_, id);
                {
                    std::lock_guard<std::mutex> lock(mutex_);
                    sessions_[id] = s;
                }
                std::lock_guard<std::mutex> lock(s->mutex);
                return reply(201, summary(*s));
            }
            if (method == "GET") {
                json ids = json::array();
                std::lock_guard<std::mutex> lock(mutex_);
                for (const auto& [id, s] : sessions_) ids.push_back(id);
                return reply(200, {{"sessions", ids}});
            }
            throw HttpError(405, "method " + method + " not allowed on /sessions");
        }

        auto s = find(parts[1]);
        std::lock_guard<std::mutex> lock(s->mutex);
        const std::string action = parts.size() > 2 ? parts[2] : "";
        if (parts.size() > 3) throw HttpError(404, "no route for " + path);

        if (action.empty()) {
            if (method == "GET") return reply(200, summary(*s));
            if (method == "DELETE") {
                std::lock_guard<std::mutex> g(mutex_);
                sessions_.erase(s->id);
                return reply(200, {{"deleted", s->id}});
            }
        } else if (action == "step" && method == "POST") {
            apply_step(*s, parse_step(parse_body(body)), opt_.undo_depth);
            return reply(200, summary(*s));
        } else if (action == "undo" && method == "POST") {
            if (s->undo.empty()) throw HttpError(409, "nothing to undo");
            auto f = std::move(s->undo.back());
            s->undo.pop_back();
            s->current = std::move(f.p);
            truncate(s->trajectory, f.trajectory_size);
            s->steps.resize(f.step_count);
            s->laser_offset = f.laser_offset;
            s->fsr = f.fsr;
            return reply(200, summary(*s));
        } else if (action == "spectrum" && method == "GET") {
            return reply(200, spectrum_json(*s));
        } else if (action == "rates" && method == "GET") {
            return reply(200, rates_json(*s));
        } else if (action == "export" && method == "GET") {
            const auto it = query.find("format");
            const std::string format = it == query.end() ? "trajectory" : it->second;
            if (format == "schedule") {
                CoolingSchedule sched;
                sched.steps = s->steps;
                sched.label = "session " + s->id;
                return {200, format_schedule(sched), "text/plain"};
            }
            if (format == "trajectory")
                return {200, export_trajectory(s->trajectory, {"session " + s->id, "molecule = " + s->cfg.molecule.name}),
                        "text/plain"};
            throw HttpError(400, "format must be 'trajectory' or 'schedule'", "?format");
        }
        throw HttpError(404, "no route for " + method + " " + path);
    } catch (const HttpError& e) {
        json j = {{"error", e.what()}};
        if (!e.field.empty()) j["field"] = e.field;
        return reply(e.status, j);
    } catch (const ForbiddenTransition& e) {
        return reply(409, {{"error", e.what()}});
    } catch (const Error& e) {
        return reply(400, {{"error", e.what()}});
    } catch (const std::exception& e) {
        return reply(500, {{"error", e.what()}});
    }
}

}  // namespace cavcool
