#include "surfflow/config.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <sstream>

#define TOML_EXCEPTIONS 1
#include <toml.hpp>

#include "surfflow/errors.hpp"
#include "surfflow/io.hpp"

namespace surfflow {

namespace {

// Reads keys out of one table and remembers which were consumed, so that
// whatever is left over can be reported as unknown.
class Section {
public:
    Section(const toml::table* table, std::string name, std::vector<std::string>& errors)
        : table_(table), name_(std::move(name)), errors_(&errors) {}

    void number(std::string_view key, double& out) {
        if (const auto* n = take(key)) {
            if (auto v = n->value<double>()) {
                out = *v;
            } else {
                bad(key, "a number");
            }
        }
    }
    void number(std::string_view key, std::optional<double>& out) {
        double v = 0.0;
        if (has(key)) {
            number(key, v);
            out = v;
        }
    }
    void integer(std::string_view key, int& out) {
        if (const auto* n = take(key)) {
            if (auto v = n->value_exact<std::int64_t>()) {
                out = static_cast<int>(*v);
            } else {
                bad(key, "an integer");
            }
        }
    }
    void integer(std::string_view key, std::uint64_t& out) {
        if (const auto* n = take(key)) {
            auto v = n->value_exact<std::int64_t>();
            if (v && *v >= 0) {
                out = static_cast<std::uint64_t>(*v);
            } else {
                bad(key, "a non-negative integer");
            }
        }
    }
    void boolean(std::string_view key, bool& out) {
        if (const auto* n = take(key)) {
            if (auto v = n->value_exact<bool>()) {
                out = *v;
            } else {
                bad(key, "true or false");
            }
        }
    }
    void string(std::string_view key, std::string& out) {
        if (const auto* n = take(key)) {
            if (auto v = n->value_exact<std::string>()) {
                out = *v;
            } else {
                bad(key, "a string");
            }
        }
    }
    void numbers(std::string_view key, std::vector<double>& out) {
        if (const auto* n = take(key)) {
            const auto* arr = n->as_array();
            bool ok = arr != nullptr;
            std::vector<double> v;
            if (ok) {
                for (const auto& el : *arr) {
                    if (auto d = el.value<double>()) {
                        v.push_back(*d);
                    } else {
                        ok = false;
                    }
                }
            }
            if (ok) {
                out = std::move(v);
            } else {
                bad(key, "an array of numbers");
            }
        }
    }
    template <class E>
    void choice(std::string_view key, E& out, const std::map<std::string, E, std::less<>>& options) {
        std::string s;
        if (!has(key)) {
            return;
        }
        string(key, s);
        auto it = options.find(s);
        if (it != options.end()) {
            out = it->second;
            return;
        }
        std::string list;
        for (const auto& [k, _] : options) {
            list += (list.empty() ? "" : ", ") + k;
        }
        errors_->push_back(where(key) + ": '" + s + "' is not one of " + list);
    }

    [[nodiscard]] bool has(std::string_view key) const { return table_ && table_->contains(key); }

    void finish() const {
        if (!table_) {
            return;
        }
        for (const auto& [k, _] : *table_) {
            if (!used_.contains(std::string(k.str()))) {
                errors_->push_back(where(k.str()) + ": unknown key");
            }
        }
    }

private:
    const toml::node* take(std::string_view key) {
        if (!table_) {
            return nullptr;
        }
        used_.insert(std::string(key));
        return table_->get(key);
    }
    [[nodiscard]] std::string where(std::string_view key) const {
        return "[" + name_ + "] " + std::string(key);
    }
    void bad(std::string_view key, const char* expected) { errors_->push_back(where(key) + ": expected " + expected); }

    const toml::table* table_;
    std::string name_;
    std::vector<std::string>* errors_;
    std::set<std::string> used_;
};

const toml::table* subtable(const toml::table& root, std::string_view name, std::vector<std::string>& errors) {
    const auto* n = root.get(name);
    if (!n) {
        return nullptr;
    }
    if (!n->is_table()) {
        errors.push_back("[" + std::string(name) + "] must be a table");
        return nullptr;
    }
    return n->as_table();
}

void read_mesh(Section s, MeshSpec& m, const std::filesystem::path& base, std::vector<std::string>& errors) {
    std::string file;
    s.string("file", file);
    if (!file.empty()) {
        std::filesystem::path p(file);
        m.file = p.is_relative() && !base.empty() ? base / p : p;
    }
    if (s.has("kind")) {
        std::string kind;
        s.string("kind", kind);
        try {
            m.kind = parse_mesh_kind(kind);
        } catch (const Error& e) {
            errors.push_back(std::string("[mesh] kind: ") + e.what());
        }
    }
    auto& g = m.params;
    s.number("width", g.width);
    s.number("height", g.height);
    s.integer("nx", g.nx);
    s.integer("ny", g.ny);
    s.number("inner_radius", g.inner_radius);
    s.number("outer_radius", g.outer_radius);
    s.integer("n_radial", g.n_radial);
    s.integer("n_angular", g.n_angular);
    s.number("major_radius", g.major_radius);
    s.number("minor_radius", g.minor_radius);
    s.integer("n_theta", g.n_theta);
    s.integer("n_phi", g.n_phi);
    s.number("diameter", g.diameter);
    s.number("length", g.length);
    s.integer("n_around", g.n_around);
    s.integer("n_axial", g.n_axial);
    s.number("hole_diameter", g.hole_diameter);
    s.number("hole_z", g.hole_z);
    s.number("channel_length", g.channel_length);
    s.number("channel_height", g.channel_height);
    s.number("hole_center_x", g.hole_center_x);
    s.number("hole_center_y", g.hole_center_y);
    s.number("hole_radius", g.hole_radius);
    s.number("h", g.h);
    s.finish();
}

PatchRule read_rule(Section s, const std::string& name, int& priority) {
    PatchRule r;
    r.name = name;
    s.integer("priority", priority);
    s.integer("loop", r.loop);
    s.number("x_min", r.x_min);
    s.number("x_max", r.x_max);
    s.number("y_min", r.y_min);
    s.number("y_max", r.y_max);
    s.number("z_min", r.z_min);
    s.number("z_max", r.z_max);
    s.boolean("pressure", r.pressure);
    s.boolean("vorticity", r.vorticity);
    s.number("g_n", r.g_n);
    s.number("g_t", r.g_t);
    s.number("g_p", r.g_p);
    s.number("g_omega", r.g_omega);
    s.boolean("parabolic", r.parabolic);
    s.number("v_max", r.v_max);
    s.number("channel_height", r.channel_height);
    s.number("y0", r.y0);
    s.finish();
    return r;
}

void apply_override(toml::table& root, const std::string& item) {
    const auto eq = item.find('=');
    if (eq == std::string::npos || eq == 0) {
        throw ConfigError("override '" + item + "' is not of the form section.key=value");
    }
    std::string path = item.substr(0, eq);
    const std::string value = item.substr(eq + 1);
    std::vector<std::string> parts;
    for (std::size_t start = 0;;) {
        const auto dot = path.find('.', start);
        parts.push_back(path.substr(start, dot - start));
        if (dot == std::string::npos) {
            break;
        }
        start = dot + 1;
    }
    toml::table parsed;
    try {
        parsed = toml::parse("v = " + value);
    } catch (const toml::parse_error&) {
        parsed.insert_or_assign("v", value);
    }
    toml::table* t = &root;
    for (std::size_t i = 0; i + 1 < parts.size(); ++i) {
        auto* n = t->get(parts[i]);
        if (!n) {
            t->insert_or_assign(parts[i], toml::table{});
            n = t->get(parts[i]);
        }
        if (!n->is_table()) {
            throw ConfigError("override '" + item + "': " + parts[i] + " is not a section");
        }
        t = n->as_table();
    }
    t->insert_or_assign(parts.back(), *parsed.get("v"));
}

} // namespace

long RunConfig::step_count() const { return std::lround(t_end / dt); }

SimConfig RunConfig::sim_config() const {
    SimConfig c;
    c.scheme = scheme;
    c.nu = scheme == Scheme::euler ? 0.0 : nu;
    c.dt = dt;
    c.t_end = t_end;
    c.curvature_mode = curvature_mode;
    c.curvature_value = curvature_value;
    c.lumped_mass = lumped_mass;
    c.cg = cg;
    c.backend = backend;
    c.blowup_speed = blowup_speed;
    return c;
}

std::string to_string(Scheme scheme) { return scheme == Scheme::euler ? "euler" : "navier_stokes"; }

std::string to_string(CurvatureMode mode) {
    switch (mode) {
    case CurvatureMode::zero:
        return "zero";
    case CurvatureMode::constant:
        return "constant";
    default:
        return "angle_defect";
    }
}

std::vector<std::string> validate(const RunConfig& c) {
    std::vector<std::string> v;
    auto need = [&](bool ok, const std::string& msg) {
        if (!ok) {
            v.push_back(msg);
        }
    };
    need(c.dt > 0.0 && std::isfinite(c.dt), "[scheme] dt: must be positive");
    need(c.t_end > 0.0 && std::isfinite(c.t_end), "[scheme] t_end: must be positive");
    need(c.nu >= 0.0 && std::isfinite(c.nu), "[scheme] nu: must be non-negative");
    need(c.cg.tol > 0.0 && c.cg.tol < 1.0, "[solver] cg_tol: must lie in (0, 1)");
    need(c.cg.max_iter >= 0, "[solver] cg_max_iter: must be non-negative");
    need(c.stabilization_beta >= 0.0, "[solver] stabilization_beta: must be non-negative");
    need(c.blowup_speed > 0.0, "[solver] blowup_speed: must be positive");
    need(c.output.csv_stride >= 1, "[output] csv_stride: must be at least 1");
    need(c.output.vtk_stride >= 0, "[output] vtk_stride: must be non-negative (0 disables)");
    need(c.output.snapshot_stride >= 0, "[output] snapshot_stride: must be non-negative (0 disables)");
    need(!c.output.csv.empty(), "[output] csv: must not be empty");
    need(c.threads >= 0, "[run] threads: must be non-negative");
    need(c.bench.census_fraction > 0.0 && c.bench.census_fraction < 1.0,
         "[bench] census_fraction: must lie in (0, 1)");
    need(c.bench.st.L > 0.0, "[bench] L: must be positive");
    need(c.bench.st.v_mean > 0.0, "[bench] v_mean: must be positive");
    need(c.initial.radial_scale > 0.0, "[initial] radial_scale: must be positive");
    if (c.mesh.file) {
        need(std::filesystem::exists(*c.mesh.file), "[mesh] file: '" + c.mesh.file->string() + "' does not exist");
    } else {
        const auto& g = c.mesh.params;
        need(g.h > 0.0, "[mesh] h: must be positive");
        need(g.nx >= 1 && g.ny >= 1, "[mesh] nx, ny: must be at least 1");
        need(g.n_radial >= 1, "[mesh] n_radial: must be at least 1");
        need(g.n_angular >= 3 && g.n_theta >= 3 && g.n_phi >= 3 && g.n_around >= 3,
             "[mesh] n_angular, n_theta, n_phi, n_around: must be at least 3");
        need(g.n_axial >= 1, "[mesh] n_axial: must be at least 1");
        if (c.initial.kind == InitialKind::kh_torus) {
            need(c.mesh.kind == MeshKind::torus, "[initial] type = kh_torus needs [mesh] kind = torus");
        }
    }
    for (const auto& r : c.boundary) {
        need(r.loop >= -1, "[boundary." + r.name + "] loop: must be -1 (any) or a loop index");
        if (r.parabolic) {
            need(r.channel_height > 0.0, "[boundary." + r.name + "] channel_height: must be positive");
        }
    }
    return v;
}

RunConfig parse_config_text(std::string_view text, const std::filesystem::path& base_dir,
                            const std::vector<std::string>& overrides) {
    toml::table root;
    try {
        root = toml::parse(text);
    } catch (const toml::parse_error& e) {
        std::ostringstream os;
        os << "syntax error on line " << e.source().begin.line << ": " << e.description();
        throw ConfigError(os.str());
    }
    for (const auto& o : overrides) {
        apply_override(root, o);
    }
    RunConfig c;
    std::vector<std::string> errors;
    const std::set<std::string, std::less<>> known = {"mesh",  "scheme", "solver", "initial", "force",
                                                      "boundary", "output", "run",    "bench"};
    for (const auto& [k, node] : root) {
        if (!known.contains(k.str())) {
            errors.push_back("[" + std::string(k.str()) + "]: unknown section");
        }
    }

    read_mesh(Section(subtable(root, "mesh", errors), "mesh", errors), c.mesh, base_dir, errors);

    {
        Section s(subtable(root, "scheme", errors), "scheme", errors);
        s.choice<Scheme>("type", c.scheme, {{"navier_stokes", Scheme::navier_stokes}, {"euler", Scheme::euler}});
        s.number("nu", c.nu);
        s.number("dt", c.dt);
        s.number("t_end", c.t_end);
        s.choice<CurvatureMode>("curvature", c.curvature_mode,
                                {{"angle_defect", CurvatureMode::angle_defect},
                                 {"zero", CurvatureMode::zero},
                                 {"constant", CurvatureMode::constant}});
        s.number("curvature_value", c.curvature_value);
        s.boolean("lumped_mass", c.lumped_mass);
        s.finish();
    }
    {
        Section s(subtable(root, "solver", errors), "solver", errors);
        s.choice<SolverBackend>("backend", c.backend, {{"cg", SolverBackend::cg}, {"direct", SolverBackend::direct}});
        s.number("cg_tol", c.cg.tol);
        s.integer("cg_max_iter", c.cg.max_iter);
        s.choice<Preconditioner>("preconditioner", c.cg.precond,
                                 {{"jacobi", Preconditioner::jacobi}, {"none", Preconditioner::none}});
        s.number("stabilization_beta", c.stabilization_beta);
        s.number("blowup_speed", c.blowup_speed);
        s.finish();
    }
    {
        Section s(subtable(root, "initial", errors), "initial", errors);
        s.choice<InitialKind>("type", c.initial.kind,
                              {{"zero", InitialKind::zero},
                               {"random", InitialKind::random},
                               {"harmonic", InitialKind::harmonic},
                               {"kh_torus", InitialKind::kh_torus},
                               {"radial", InitialKind::radial}});
        s.number("amplitude", c.initial.amplitude);
        s.numbers("harmonic", c.initial.harmonic);
        s.number("v_inf", c.initial.kh.v_inf);
        s.number("delta0", c.initial.kh.delta0);
        s.number("c_n", c.initial.kh.c_n);
        s.number("radial_scale", c.initial.radial_scale);
        s.finish();
    }
    {
        Section s(subtable(root, "force", errors), "force", errors);
        s.choice<ForceKind>("type", c.force.kind,
                            {{"none", ForceKind::none},
                             {"constant", ForceKind::constant},
                             {"pierced_ring", ForceKind::pierced_ring}});
        std::vector<double> vec;
        s.numbers("vector", vec);
        if (!vec.empty()) {
            if (vec.size() == 3) {
                c.force.vector = Vec3(vec[0], vec[1], vec[2]);
            } else {
                errors.emplace_back("[force] vector: expected 3 components");
            }
        }
        s.number("magnitude", c.force.magnitude);
        s.finish();
    }
    if (const auto* b = subtable(root, "boundary", errors)) {
        std::vector<std::pair<int, PatchRule>> rules;
        for (const auto& [k, node] : *b) {
            const std::string name(k.str());
            if (!node.is_table()) {
                errors.push_back("[boundary." + name + "] must be a table");
                continue;
            }
            int priority = 0;
            auto r = read_rule(Section(node.as_table(), "boundary." + name, errors), name, priority);
            rules.emplace_back(priority, std::move(r));
        }
        std::stable_sort(rules.begin(), rules.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
        for (auto& [_, r] : rules) {
            c.boundary.push_back(std::move(r));
        }
    }
    {
        Section s(subtable(root, "output", errors), "output", errors);
        std::string dir;
        s.string("dir", dir);
        if (!dir.empty()) {
            c.output.dir = dir;
        }
        s.string("csv", c.output.csv);
        s.integer("csv_stride", c.output.csv_stride);
        s.integer("vtk_stride", c.output.vtk_stride);
        s.integer("snapshot_stride", c.output.snapshot_stride);
        s.finish();
    }
    {
        Section s(subtable(root, "run", errors), "run", errors);
        s.integer("seed", c.seed);
        s.integer("threads", c.threads);
        s.finish();
    }
    {
        Section s(subtable(root, "bench", errors), "bench", errors);
        s.choice<BenchKind>("type", c.bench.kind,
                            {{"none", BenchKind::none},
                             {"st", BenchKind::st},
                             {"pierced_ring", BenchKind::pierced_ring},
                             {"kh", BenchKind::kh}});
        s.number("t_start", c.bench.t_start);
        s.number("census_fraction", c.bench.census_fraction);
        s.number("L", c.bench.st.L);
        s.number("v_mean", c.bench.st.v_mean);
        s.finish();
    }
    c.bench.st.nu = c.nu;

    auto semantic = validate(c);
    errors.insert(errors.end(), semantic.begin(), semantic.end());
    if (!errors.empty()) {
        std::string msg = "invalid configuration:";
        for (const auto& e : errors) {
            msg += "\n  " + e;
        }
        throw ConfigError(msg);
    }
    return c;
}

RunConfig parse_config(const std::filesystem::path& path, const std::vector<std::string>& overrides) {
    if (!std::filesystem::exists(path)) {
        throw ConfigError("config file '" + path.string() + "' does not exist");
    }
    return parse_config_text(read_file(path), path.parent_path(), overrides);
}

} // namespace surfflow
