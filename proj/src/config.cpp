#include "looplab/config.hpp"

#include <fmt/format.h>

#include <fstream>
#include <sstream>

namespace looplab {

Section::Section(YAML::Node node, std::string path) : node_(std::move(node)), path_(std::move(path)) {
    if (node_ && !node_.IsNull() && !node_.IsMap())
        throw ConfigError(fmt::format("{} (line {}): expected a mapping", path_, line()));
}

int Section::line() const { return node_ ? node_.Mark().line + 1 : 0; }

void Section::fail(const YAML::Node& n, const std::string& key, const std::string& msg) const {
    const int ln = n ? n.Mark().line + 1 : line();
    throw ConfigError(fmt::format("{}.{} (line {}): {}", path_, key, ln, msg));
}

YAML::Node Section::raw(const std::string& key) const { return get(key); }

bool Section::has(const std::string& key) const { return node_ && node_.IsMap() && node_[key]; }

YAML::Node Section::get(const std::string& key) const {
    seen_.insert(key);
    if (!has(key)) return YAML::Node();
    return node_[key];
}

double Section::number(const std::string& key, double def) const {
    const YAML::Node n = get(key);
    if (!n || n.IsNull()) return def;
    try {
        return n.as<double>();
    } catch (const YAML::Exception&) {
        fail(n, key, "expected a number");
    }
}

double Section::number(const std::string& key) const {
    if (!has(key)) throw ConfigError(fmt::format("{} (line {}): missing required key '{}'", path_, line(), key));
    return number(key, 0.0);
}

int Section::integer(const std::string& key, int def) const {
    const YAML::Node n = get(key);
    if (!n || n.IsNull()) return def;
    try {
        return n.as<int>();
    } catch (const YAML::Exception&) {
        fail(n, key, "expected an integer");
    }
}

std::string Section::text(const std::string& key, const std::string& def) const {
    const YAML::Node n = get(key);
    if (!n || n.IsNull()) return def;
    if (!n.IsScalar()) fail(n, key, "expected a string");
    return n.as<std::string>();
}

std::string Section::text(const std::string& key) const {
    if (!has(key)) throw ConfigError(fmt::format("{} (line {}): missing required key '{}'", path_, line(), key));
    return text(key, "");
}

bool Section::flag(const std::string& key, bool def) const {
    const YAML::Node n = get(key);
    if (!n || n.IsNull()) return def;
    try {
        return n.as<bool>();
    } catch (const YAML::Exception&) {
        fail(n, key, "expected true or false");
    }
}

Vec3 Section::vec(const std::string& key, const Vec3& def) const {
    const YAML::Node n = get(key);
    if (!n || n.IsNull()) return def;
    if (!n.IsSequence() || n.size() != 3) fail(n, key, "expected a list of 3 numbers");
    try {
        return {n[0].as<double>(), n[1].as<double>(), n[2].as<double>()};
    } catch (const YAML::Exception&) {
        fail(n, key, "expected a list of 3 numbers");
    }
}

std::vector<double> Section::numbers(const std::string& key, const std::vector<double>& def) const {
    const YAML::Node n = get(key);
    if (!n || n.IsNull()) return def;
    if (!n.IsSequence() || n.size() == 0) fail(n, key, "expected a non-empty list of numbers");
    std::vector<double> v;
    try {
        for (const auto& x : n) v.push_back(x.as<double>());
    } catch (const YAML::Exception&) {
        fail(n, key, "expected a list of numbers");
    }
    return v;
}

std::vector<int> Section::integers(const std::string& key, const std::vector<int>& def) const {
    const YAML::Node n = get(key);
    if (!n || n.IsNull()) return def;
    if (!n.IsSequence() || n.size() == 0) fail(n, key, "expected a non-empty list of integers");
    std::vector<int> v;
    try {
        for (const auto& x : n) v.push_back(x.as<int>());
    } catch (const YAML::Exception&) {
        fail(n, key, "expected a list of integers");
    }
    return v;
}

Section Section::child(const std::string& key) const {
    if (!has(key)) throw ConfigError(fmt::format("{} (line {}): missing required key '{}'", path_, line(), key));
    return Section(get(key), path_ + "." + key);
}

std::optional<Section> Section::optional_child(const std::string& key) const {
    if (!has(key)) {
        seen_.insert(key);
        return std::nullopt;
    }
    return child(key);
}

void Section::finish() const {
    if (!node_ || node_.IsNull()) return;
    for (const auto& kv : node_) {
        const std::string k = kv.first.as<std::string>();
        if (!seen_.count(k))
            throw ConfigError(fmt::format("{}.{} (line {}): unknown key", path_, k, kv.first.Mark().line + 1));
    }
}

namespace {

void positive(double v, const std::string& what) {
    if (!(v > 0.0)) throw ConfigError(fmt::format("{} must be positive, got {}", what, v));
}

FieldConfig parse_field(const Section& s) {
    FieldConfig f;
    f.type = s.text("type");
    if (f.type == "abc") {
        f.A = s.number("A", f.A);
        f.B = s.number("B", f.B);
        f.C = s.number("C", f.C);
    } else if (f.type == "wave") {
        f.wave_re = s.vec("amplitude_re", f.wave_re);
        f.wave_im = s.vec("amplitude_im", f.wave_im);
        f.wave_k = s.vec("wavevector", f.wave_k);
    } else if (f.type == "constant") {
        f.constant = s.vec("value", f.constant);
    } else if (f.type != "rotation" && f.type != "mixed") {
        throw ConfigError(fmt::format("{}.type (line {}): unknown field type '{}' (abc, wave, rotation, constant, mixed)",
                                      s.path(), s.line(), f.type));
    }
    f.time_law = s.text("time_law", f.type == "abc" ? "beltrami" : "static");
    if (f.time_law == "linear") f.rate = s.number("rate");
    else if (f.time_law != "beltrami" && f.time_law != "static")
        throw ConfigError(fmt::format("{}.time_law: expected beltrami, static or linear", s.path()));
    if (f.time_law == "beltrami" && f.type != "abc")
        throw ConfigError(fmt::format("{}.time_law: beltrami decay needs an abc field", s.path()));
    s.finish();
    return f;
}

LoopConfig parse_loop(const Section& s) {
    LoopConfig l;
    l.type = s.text("type", l.type);
    if (l.type != "circle" && l.type != "ellipse")
        throw ConfigError(fmt::format("{}.type: expected circle or ellipse", s.path()));
    l.center = s.vec("center", l.center);
    l.radius = s.number("radius", l.radius);
    positive(l.radius, s.path() + ".radius");
    if (l.type == "ellipse") {
        l.semi_minor = s.number("semi_minor", l.semi_minor);
        positive(l.semi_minor, s.path() + ".semi_minor");
    }
    l.normal = s.vec("normal", l.normal);
    if (!(norm(l.normal) > 0.0)) throw ConfigError(s.path() + ".normal must be nonzero");
    l.N = s.integer("N", l.N);
    if (l.N < 3) throw ConfigError(s.path() + ".N must be >= 3");
    s.finish();
    return l;
}

std::string dump(const YAML::Node& n) {
    YAML::Emitter e;
    e << n;
    return e.c_str();
}

}  // namespace

RunConfig parse_config(const std::string& text, const std::string& source) {
    YAML::Node root;
    try {
        root = YAML::Load(text);
    } catch (const YAML::ParserException& e) {
        throw ConfigError(fmt::format("{}: line {}: {}", source, e.mark.line + 1, e.msg));
    }
    if (!root || !root.IsMap()) throw ConfigError(source + ": top level must be a mapping");
    Section top(root, "config");
    RunConfig c;
    c.source = source;
    c.echo = dump(root);
    const double seed = top.number("seed", 1.0);
    if (seed < 0 || seed != std::floor(seed)) throw ConfigError("config.seed must be a non-negative integer");
    c.seed = static_cast<std::uint64_t>(seed);
    c.threads = top.integer("threads", 0);
    if (c.threads < 0) throw ConfigError("config.threads must be >= 0");
    c.output = top.text("output", c.output);
    c.field = parse_field(top.child("field"));
    c.loop = parse_loop(top.child("loop"));
    if (auto o = top.optional_child("operator")) {
        c.op.gamma = o->number("gamma", c.op.gamma);
        c.op.nu = o->number("nu", c.op.nu);
        c.op.alpha = o->number("alpha", c.op.alpha);
        c.op.N = c.loop.N;
        if (auto b = o->optional_child("ball")) {
            c.op.ball.panel_length = b->number("panel_length", c.op.ball.panel_length);
            c.op.ball.radial_nodes = b->integer("radial_nodes", c.op.ball.radial_nodes);
            c.op.ball.n_theta = b->integer("n_theta", c.op.ball.n_theta);
            c.op.ball.n_phi = b->integer("n_phi", c.op.ball.n_phi);
            c.op.ball.max_refine = b->integer("max_refine", c.op.ball.max_refine);
            c.op.ball.refine_tol = b->number("refine_tol", c.op.ball.refine_tol);
            b->finish();
        }
        o->finish();
    }
    positive(c.op.gamma, "operator.gamma");
    positive(c.op.nu, "operator.nu");
    if (!(c.op.alpha > 0.0 && c.op.alpha < 1.0)) throw ConfigError("operator.alpha must be in (0, 1)");
    c.op.N = c.loop.N;
    if (auto q = top.optional_child("quadrature")) {
        c.quad.nodes_per_segment = q->integer("nodes_per_segment", c.quad.nodes_per_segment);
        c.quad.nodes_a = q->integer("nodes_a", c.quad.nodes_a);
        c.quad.fd_step = q->number("fd_step", c.quad.fd_step);
        c.quad.fd_step_mixed = q->number("fd_step_mixed", c.quad.fd_step_mixed);
        c.quad.richardson_levels = q->integer("richardson_levels", c.quad.richardson_levels);
        q->finish();
    }
    try {
        validate(c.quad);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("quadrature: ") + e.what());
    }
    if (!top.has("experiments")) throw ConfigError(source + ": missing required key 'experiments'");
    const YAML::Node ex = top.raw("experiments");
    if (!ex.IsSequence() || ex.size() == 0)
        throw ConfigError(fmt::format("config.experiments (line {}): expected a non-empty list", ex.Mark().line + 1));
    for (std::size_t i = 0; i < ex.size(); ++i) {
        const std::string path = fmt::format("experiments[{}]", i);
        if (ex[i].IsScalar()) {
            c.experiments.push_back({ex[i].as<std::string>(), Section(YAML::Node(), path)});
            continue;
        }
        Section s(ex[i], path);
        const std::string id = s.text("id");
        c.experiments.push_back({id, s});
    }
    top.finish();
    return c;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config file " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str(), path);
}

AnalyticField make_field(const FieldConfig& f, double nu) {
    TimeLaw law;
    if (f.time_law == "beltrami") law = TimeLaw::beltrami(1.0, nu);
    else if (f.time_law == "linear") law = TimeLaw::linear(f.rate);
    if (f.type == "abc") return abc_field(f.A, f.B, f.C, law);
    if (f.type == "wave") {
        AnalyticField a = single_mode_field(make_wave_mode(CVec3{f.wave_re, f.wave_im}, f.wave_k), law);
        return a;
    }
    if (f.type == "rotation") return rotation_field(law);
    if (f.type == "constant") {
        AnalyticField a = constant_field(f.constant);
        a.law = law;
        return a;
    }
    AnalyticField a = mixed_test_field();
    a.law = law;
    return a;
}

SampledCurve make_curve(const LoopConfig& l) {
    if (l.type == "circle") return circle_curve(l.center, l.radius, l.normal / norm(l.normal));
    Vec3 e1, e2;
    plane_basis(l.normal / norm(l.normal), e1, e2);
    return ellipse_curve(l.center, l.radius, l.semi_minor, e1, e2);
}

PolygonalLoop make_loop(const LoopConfig& l, int N) { return discretize_curve(make_curve(l), N).loop; }

}  // namespace looplab
