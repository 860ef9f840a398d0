#include "choc/config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <set>
#include <sstream>
#include <vector>

#include "choc/io.hpp"
#include "choc/state_solver.hpp"

namespace choc {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

// section -> allowed keys
const std::map<std::string, std::set<std::string>> kSchema = {
    {"grid", {"dim", "n", "lengths"}},
    {"model",
     {"alpha", "beta", "t_final", "nt", "prolif_kind", "prolif_p0", "prolif_s", "mu0", "phi0",
      "sigma0"}},
    {"potential", {"kind", "k", "eps_domain"}},
    {"cost",
     {"b0", "b1", "b2", "b3", "b4", "b5", "b6", "phi_q", "sigma_q", "mu_q", "phi_omega",
      "sigma_omega", "mu_omega"}},
    {"control", {"lower", "upper", "init", "direction"}},
    {"solver",
     {"newton_tol", "newton_floor", "newton_max_iter", "newton_max_halvings", "linear_tol",
      "linear_max_iter_factor"}},
    {"optimizer",
     {"max_iters", "tol_stat", "initial_step", "backtrack_factor", "armijo_c",
      "max_backtracks"}},
    {"output", {"dir", "seed"}},
};

class KeyMap {
public:
    explicit KeyMap(std::map<std::string, std::string> kv) : kv_(std::move(kv)) {}

    bool has(const std::string& key) const { return kv_.count(key) > 0; }

    std::string get(const std::string& key, const std::string& fallback) {
        auto it = kv_.find(key);
        if (it == kv_.end()) {
            kv_[key] = fallback;
            return fallback;
        }
        return it->second;
    }

    std::string require(const std::string& key) const {
        auto it = kv_.find(key);
        if (it == kv_.end()) throw ConfigError("missing required key \"" + key + "\"");
        return it->second;
    }

    double get_double(const std::string& key, double fallback) {
        return parse_double(key, get(key, format_double(fallback)));
    }
    double require_double(const std::string& key) const {
        return parse_double(key, require(key));
    }
    long long get_int(const std::string& key, long long fallback) {
        return parse_int(key, get(key, std::to_string(fallback)));
    }
    long long require_int(const std::string& key) const { return parse_int(key, require(key)); }

    static double parse_double(const std::string& key, const std::string& v) {
        try {
            std::size_t pos = 0;
            const double d = std::stod(v, &pos);
            if (pos != v.size()) throw std::invalid_argument(v);
            return d;
        } catch (const std::exception&) {
            throw ConfigError("key \"" + key + "\": expected a number, got \"" + v + "\"");
        }
    }

    static long long parse_int(const std::string& key, const std::string& v) {
        try {
            std::size_t pos = 0;
            const long long i = std::stoll(v, &pos);
            if (pos != v.size()) throw std::invalid_argument(v);
            return i;
        } catch (const std::exception&) {
            throw ConfigError("key \"" + key + "\": expected an integer, got \"" + v + "\"");
        }
    }

    static std::string format_double(double d) {
        std::ostringstream os;
        os.precision(17);
        os << d;
        return os.str();
    }

    const std::map<std::string, std::string>& entries() const { return kv_; }

private:
    std::map<std::string, std::string> kv_;
};

std::vector<double> parse_list(const std::string& key, const std::string& v) {
    std::vector<double> out;
    std::stringstream ss(v);
    std::string tok;
    while (std::getline(ss, tok, ',')) out.push_back(KeyMap::parse_double(key, trim(tok)));
    if (out.empty()) throw ConfigError("key \"" + key + "\": empty list");
    return out;
}

/// "constant:<v>" | "cosine:<amp>@<k0>[,k1[,k2]]" ('+'-joined terms) | "file:<path>"
Field parse_field_spec(const std::string& key, const std::string& spec, const Grid& g) {
    const auto colon = spec.find(':');
    if (colon == std::string::npos)
        throw ConfigError("key \"" + key + "\": field spec \"" + spec +
                          "\" must be constant:<v>, cosine:<amp>@<modes> or file:<path>");
    const std::string kind = spec.substr(0, colon);
    const std::string body = spec.substr(colon + 1);
    if (kind == "constant") {
        return Field(g, KeyMap::parse_double(key, body));
    }
    if (kind == "cosine") {
        Field f(g, 0.0);
        std::stringstream terms(body);
        std::string term;
        while (std::getline(terms, term, '+')) {
            const auto at = term.find('@');
            if (at == std::string::npos)
                throw ConfigError("key \"" + key + "\": cosine term \"" + term +
                                  "\" must be <amp>@<modes>");
            const double amp = KeyMap::parse_double(key, trim(term.substr(0, at)));
            std::array<int, 3> modes{0, 0, 0};
            std::stringstream ms(term.substr(at + 1));
            std::string mtok;
            int axis = 0;
            while (std::getline(ms, mtok, ',')) {
                if (axis >= g.dim)
                    throw ConfigError("key \"" + key + "\": more modes than grid dimensions");
                modes[axis++] = static_cast<int>(KeyMap::parse_int(key, trim(mtok)));
            }
            if (axis == 0) throw ConfigError("key \"" + key + "\": missing mode index");
            f += cosine_field(g, amp, modes);
        }
        return f;
    }
    if (kind == "file") {
        const std::vector<Field> fields = read_snapshot(body);
        if (fields.size() != 1)
            throw ConfigError("key \"" + key + "\": snapshot must hold exactly one field");
        if (!(fields[0].grid() == g))
            throw ConfigError("key \"" + key + "\": snapshot grid does not match [grid]");
        return fields[0];
    }
    throw ConfigError("key \"" + key + "\": unknown field spec kind \"" + kind + "\"");
}

std::map<std::string, std::map<std::string, std::string>> tokenize(const std::string& text) {
    std::map<std::string, std::map<std::string, std::string>> sections;
    std::istringstream is(text);
    std::string line, section;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#' || t[0] == ';') continue;
        if (t.front() == '[') {
            if (t.back() != ']')
                throw ConfigError("line " + std::to_string(lineno) + ": malformed section header");
            section = trim(t.substr(1, t.size() - 2));
            if (kSchema.find(section) == kSchema.end())
                throw ConfigError("unknown section [" + section + "]");
            if (sections.count(section))
                throw ConfigError("duplicate section [" + section + "]");
            sections[section];
            continue;
        }
        const auto eq = t.find('=');
        if (eq == std::string::npos)
            throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
        if (section.empty())
            throw ConfigError("line " + std::to_string(lineno) + ": key outside any section");
        const std::string key = trim(t.substr(0, eq));
        const std::string value = trim(t.substr(eq + 1));
        const auto& allowed = kSchema.at(section);
        if (allowed.find(key) == allowed.end())
            throw ConfigError("unknown key \"" + section + "." + key + "\"");
        if (sections[section].count(key))
            throw ConfigError("duplicate key \"" + section + "." + key + "\"");
        sections[section][key] = value;
    }
    return sections;
}

/// Maps a violated hypothesis to the config keys most likely at fault.
std::string hypothesis_key_hint(const std::string& name) {
    if (name == "H1") return "cost.b0..b6";
    if (name == "H2") return "control.lower/control.upper or cost targets";
    if (name == "H3") return "model.alpha/model.beta";
    if (name == "H4") return "model.mu0/model.phi0/model.sigma0";
    if (name == "H9") return "model.phi0 vs potential domain";
    return "";
}

}  // namespace

RunSpec parse_config_text(const std::string& text) {
    auto sections = tokenize(text);
    auto section = [&sections](const std::string& name) {
        return KeyMap(sections.count(name) ? sections[name]
                                           : std::map<std::string, std::string>{});
    };

    RunSpec spec;

    // [grid]
    KeyMap grid_kv = section("grid");
    const int dim = static_cast<int>(grid_kv.require_int("dim"));
    const std::vector<double> n_raw = parse_list("grid.n", grid_kv.require("n"));
    const std::vector<double> len = parse_list("grid.lengths", grid_kv.require("lengths"));
    std::vector<int> n(n_raw.size());
    std::transform(n_raw.begin(), n_raw.end(), n.begin(),
                   [](double v) { return static_cast<int>(v); });
    const Grid g = build_grid(dim, n, len);

    // [potential]
    KeyMap pot_kv = section("potential");
    const std::string pkind = pot_kv.get("kind", "logarithmic");
    Potential pot = Potential::make_regular();
    if (pkind == "logarithmic") {
        pot = Potential::make_logarithmic(pot_kv.get_double("k", 2.0));
    } else if (pkind == "regular") {
        if (pot_kv.has("k"))
            throw ConfigError("key \"potential.k\" only applies to the logarithmic kind");
        pot_kv.get("k", "0");
    } else {
        throw ConfigError("key \"potential.kind\": unknown kind \"" + pkind + "\"");
    }
    pot.set_eps_domain(pot_kv.get_double("eps_domain", 1e-9));

    // [model]
    KeyMap model_kv = section("model");
    ModelParams params;
    params.alpha = model_kv.require_double("alpha");
    params.beta = model_kv.require_double("beta");
    params.t_final = model_kv.require_double("t_final");
    params.nt = static_cast<int>(model_kv.require_int("nt"));
    if (params.nt < 1) throw ConfigError("key \"model.nt\" must be >= 1");
    if (!(params.t_final > 0.0)) throw ConfigError("key \"model.t_final\" must be > 0");
    params.potential = pot;
    const std::string prolif_kind = model_kv.get("prolif_kind", "sigmoid");
    const double p0 = model_kv.get_double("prolif_p0", 1.0);
    const double ps = model_kv.get_double("prolif_s", 2.0);
    if (prolif_kind == "sigmoid")
        params.prolif = Proliferation::make_sigmoid(p0, ps);
    else if (prolif_kind == "constant")
        params.prolif = Proliferation::make_constant(p0);
    else
        throw ConfigError("key \"model.prolif_kind\": unknown kind \"" + prolif_kind + "\"");

    StateTriple initial;
    initial.mu = parse_field_spec("model.mu0", model_kv.get("mu0", "constant:0"), g);
    initial.phi = parse_field_spec("model.phi0", model_kv.get("phi0", "cosine:0.3@1"), g);
    initial.sigma = parse_field_spec("model.sigma0", model_kv.get("sigma0", "constant:0.5"), g);

    // [solver]
    KeyMap solver_kv = section("solver");
    params.newton.tol = solver_kv.get_double("newton_tol", 1e-11);
    params.newton.floor = solver_kv.get_double("newton_floor", 1e-13);
    params.newton.max_iter = static_cast<int>(solver_kv.get_int("newton_max_iter", 50));
    params.newton.max_halvings = static_cast<int>(solver_kv.get_int("newton_max_halvings", 30));
    params.linear.rel_tol = solver_kv.get_double("linear_tol", 1e-12);
    params.linear.max_iter_factor =
        static_cast<int>(solver_kv.get_int("linear_max_iter_factor", 40));

    // [cost]
    KeyMap cost_kv = section("cost");
    CostSpec cost;
    cost.b0 = cost_kv.get_double("b0", 0.0);
    cost.b1 = cost_kv.get_double("b1", 0.0);
    cost.b2 = cost_kv.get_double("b2", 0.0);
    cost.b3 = cost_kv.get_double("b3", 0.0);
    cost.b4 = cost_kv.get_double("b4", 0.0);
    cost.b5 = cost_kv.get_double("b5", 0.0);
    cost.b6 = cost_kv.get_double("b6", 0.0);
    if (cost_kv.has("phi_q"))
        cost.phi_q = TimeTarget(parse_field_spec("cost.phi_q", cost_kv.require("phi_q"), g));
    if (cost_kv.has("sigma_q"))
        cost.sigma_q =
            TimeTarget(parse_field_spec("cost.sigma_q", cost_kv.require("sigma_q"), g));
    if (cost_kv.has("mu_q"))
        cost.mu_q = TimeTarget(parse_field_spec("cost.mu_q", cost_kv.require("mu_q"), g));
    if (cost_kv.has("phi_omega"))
        cost.phi_omega = parse_field_spec("cost.phi_omega", cost_kv.require("phi_omega"), g);
    if (cost_kv.has("sigma_omega"))
        cost.sigma_omega =
            parse_field_spec("cost.sigma_omega", cost_kv.require("sigma_omega"), g);
    if (cost_kv.has("mu_omega"))
        cost.mu_omega = parse_field_spec("cost.mu_omega", cost_kv.require("mu_omega"), g);

    // [control]
    KeyMap control_kv = section("control");
    ControlBox box;
    box.lower = parse_field_spec("control.lower", control_kv.require("lower"), g);
    box.upper = parse_field_spec("control.upper", control_kv.require("upper"), g);
    const Field u_init_field =
        parse_field_spec("control.init", control_kv.get("init", "constant:0"), g);
    const Field dir_field =
        parse_field_spec("control.direction", control_kv.get("direction", "cosine:0.5@1"), g);

    // [optimizer]
    KeyMap opt_kv = section("optimizer");
    spec.optimizer.max_iters = static_cast<int>(opt_kv.get_int("max_iters", 200));
    spec.optimizer.tol_stat = opt_kv.get_double("tol_stat", 1e-10);
    spec.optimizer.initial_step = opt_kv.get_double("initial_step", 1.0);
    spec.optimizer.backtrack_factor = opt_kv.get_double("backtrack_factor", 0.5);
    spec.optimizer.armijo_c = opt_kv.get_double("armijo_c", 1e-4);
    spec.optimizer.max_backtracks = static_cast<int>(opt_kv.get_int("max_backtracks", 40));

    // [output]
    KeyMap output_kv = section("output");
    spec.output_dir = output_kv.get("dir", "out");
    spec.seed = static_cast<unsigned long long>(output_kv.get_int("seed", 42));

    spec.problem.params = params;
    spec.problem.cost = cost;
    spec.problem.box = box;
    spec.problem.initial = initial;
    spec.u_init = ControlTrajectory(g, params.nt, 0.0);
    spec.direction = ControlTrajectory(g, params.nt, 0.0);
    for (int t = 1; t <= params.nt; ++t) {
        spec.u_init.at(t) = u_init_field;
        spec.direction.at(t) = dir_field;
    }

    // Hypotheses gate before any solver touches the spec.
    const HypothesesReport rep = check_hypotheses(spec.problem);
    if (!rep.all_ok()) {
        const auto fail = rep.first_failure();
        const std::string hname = fail.substr(0, fail.find(':'));
        std::string msg = "hypothesis violation - " + fail;
        const std::string hint = hypothesis_key_hint(hname);
        if (!hint.empty()) msg += " (check " + hint + ")";
        throw ConfigError(msg);
    }

    // Canonical raw map (defaults included) for serialization and equality.
    for (const auto& [name, kv] :
         std::map<std::string, KeyMap>{{"grid", grid_kv},
                                       {"model", model_kv},
                                       {"potential", pot_kv},
                                       {"cost", cost_kv},
                                       {"control", control_kv},
                                       {"solver", solver_kv},
                                       {"optimizer", opt_kv},
                                       {"output", output_kv}})
        for (const auto& [k, v] : kv.entries()) spec.raw[name + "." + k] = v;

    return spec;
}

RunSpec parse_config(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw ConfigError("cannot open config file: " + path);
    std::ostringstream os;
    os << is.rdbuf();
    return parse_config_text(os.str());
}

std::string serialize_config(const RunSpec& spec) {
    // Fixed section order; keys alphabetical within each (std::map order).
    const std::array<std::string, 8> order = {"grid",    "model",     "potential", "cost",
                                              "control", "solver",    "optimizer", "output"};
    std::ostringstream os;
    for (const auto& sec : order) {
        os << "[" << sec << "]\n";
        const std::string prefix = sec + ".";
        for (const auto& [k, v] : spec.raw)
            if (k.rfind(prefix, 0) == 0) os << k.substr(prefix.size()) << " = " << v << "\n";
        os << "\n";
    }
    return os.str();
}

bool operator==(const RunSpec& a, const RunSpec& b) { return a.raw == b.raw; }

}  // namespace choc
