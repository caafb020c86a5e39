#include "romopt/pipeline.hpp"

#include "romopt/io_util.hpp"

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <iostream>
#include <map>
#include <mutex>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <utility>
#include <vector>

namespace romopt {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

// ---------------------------------------------------------------------------
// config file parsing

std::string trim(std::string_view s) {
    std::size_t b = 0;
    std::size_t e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return std::string(s.substr(b, e - b));
}

const std::map<std::string, std::set<std::string>>& config_schema() {
    static const std::map<std::string, std::set<std::string>> schema = {
        {"paths", {"base_mesh", "parameterization", "workspace"}},
        {"solver", {"id", "t_start", "t_end", "snapshots"}},
        {"doe", {"interior", "seed"}},
        {"dmd", {"rank", "eta", "horizon", "steady_only"}},
        {"rom", {"rank", "kernel", "epsilon", "lambda", "center"}},
        {"optimizer",
         {"interior", "budget", "seed", "tol", "stall", "polish_best", "polish_random", "kernel",
          "epsilon", "lambda"}},
        {"flow", {"speed", "density", "reference_area", "froude", "direction"}},
    };
    return schema;
}

using RawConfig = std::map<std::string, std::map<std::string, std::string>>;

RawConfig parse_config_text(const std::string& text, const std::string& ctx) {
    RawConfig raw;
    std::string section;
    std::istringstream lines(text);
    std::string line;
    int lineno = 0;
    while (std::getline(lines, line)) {
        ++lineno;
        const std::size_t hash = line.find('#');
        if (hash != std::string::npos) {
            line.erase(hash);
        }
        const std::string entry = trim(line);
        if (entry.empty()) {
            continue;
        }
        const std::string where = ctx + ":" + std::to_string(lineno);
        if (entry.front() == '[') {
            if (entry.back() != ']') {
                throw ConfigError(where + ": malformed section header '" + entry + "'");
            }
            section = trim(entry.substr(1, entry.size() - 2));
            if (!config_schema().count(section)) {
                throw ConfigError(where + ": unknown section [" + section + "]");
            }
            continue;
        }
        const std::size_t eq = entry.find('=');
        if (eq == std::string::npos) {
            throw ConfigError(where + ": expected 'key = value', got '" + entry + "'");
        }
        if (section.empty()) {
            throw ConfigError(where + ": key outside any [section]");
        }
        const std::string key = trim(entry.substr(0, eq));
        const std::string value = trim(entry.substr(eq + 1));
        if (!config_schema().at(section).count(key)) {
            throw ConfigError(where + ": unknown key '" + key + "' in [" + section + "]");
        }
        if (value.empty()) {
            throw ConfigError(where + ": empty value for '" + key + "'");
        }
        if (!raw[section].emplace(key, value).second) {
            throw ConfigError(where + ": duplicate key '" + key + "' in [" + section + "]");
        }
    }
    return raw;
}

const std::string* find_value(const RawConfig& raw, const std::string& section,
                              const std::string& key) {
    const auto sec = raw.find(section);
    if (sec == raw.end()) {
        return nullptr;
    }
    const auto item = sec->second.find(key);
    return item == sec->second.end() ? nullptr : &item->second;
}

std::string require_value(const RawConfig& raw, const std::string& section, const std::string& key,
                          const std::string& ctx) {
    const std::string* v = find_value(raw, section, key);
    if (!v) {
        throw ConfigError(ctx + ": missing required key '" + key + "' in [" + section + "]");
    }
    return *v;
}

double value_or_double(const RawConfig& raw, const std::string& section, const std::string& key,
                       double fallback) {
    const std::string* v = find_value(raw, section, key);
    return v ? parse_double(*v, "[" + section + "] " + key) : fallback;
}

long value_or_long(const RawConfig& raw, const std::string& section, const std::string& key,
                   long fallback) {
    const std::string* v = find_value(raw, section, key);
    return v ? parse_long(*v, "[" + section + "] " + key) : fallback;
}

bool value_or_bool(const RawConfig& raw, const std::string& section, const std::string& key,
                   bool fallback) {
    const std::string* v = find_value(raw, section, key);
    if (!v) {
        return fallback;
    }
    if (*v == "true") {
        return true;
    }
    if (*v == "false") {
        return false;
    }
    throw ConfigError("[" + section + "] " + key + ": expected true or false, got '" + *v + "'");
}

std::optional<double> value_or_optional(const RawConfig& raw, const std::string& section,
                                        const std::string& key) {
    const std::string* v = find_value(raw, section, key);
    if (!v || *v == "none") {
        return std::nullopt;
    }
    return parse_double(*v, "[" + section + "] " + key);
}

RankPolicy value_or_rank(const RawConfig& raw, const std::string& section, RankPolicy fallback) {
    const std::string* v = find_value(raw, section, "rank");
    if (!v) {
        return fallback;
    }
    const std::string ctx = "[" + section + "] rank";
    const std::size_t colon = v->find(':');
    if (colon == std::string::npos) {
        throw ConfigError(ctx + ": expected fixed:<r> or energy:<fraction>, got '" + *v + "'");
    }
    const std::string kind = v->substr(0, colon);
    const std::string arg = v->substr(colon + 1);
    if (kind == "fixed") {
        return RankPolicy::fixed(static_cast<int>(parse_long(arg, ctx)));
    }
    if (kind == "energy") {
        return RankPolicy::energy(parse_double(arg, ctx));
    }
    throw ConfigError(ctx + ": unknown rank policy '" + kind + "'");
}

RbfKernel value_or_kernel(const RawConfig& raw, const std::string& section, RbfKernel fallback) {
    const std::string* name = find_value(raw, section, "kernel");
    const double eps = value_or_double(raw, section, "epsilon", 0.0);
    std::string family = name ? *name : std::string();
    if (family.empty()) {
        RbfKernel k = fallback;
        if (eps != 0.0) {
            k.epsilon = eps;
        }
        return k;
    }
    if (family == "multiquadric") {
        return RbfKernel::multiquadric(eps);
    }
    if (family == "gaussian") {
        return RbfKernel::gaussian(eps);
    }
    if (family == "thin-plate") {
        if (eps != 0.0) {
            throw ConfigError("[" + section + "] epsilon: the thin-plate kernel has no shape "
                              "parameter");
        }
        return RbfKernel::thin_plate();
    }
    throw ConfigError("[" + section + "] kernel: unknown kernel '" + family + "'");
}

Vec3 value_or_direction(const RawConfig& raw, Vec3 fallback) {
    const std::string* v = find_value(raw, "flow", "direction");
    if (!v) {
        return fallback;
    }
    std::istringstream parts(*v);
    std::vector<double> comps;
    std::string token;
    while (parts >> token) {
        comps.push_back(parse_double(token, "[flow] direction"));
    }
    if (comps.size() != 3) {
        throw ConfigError("[flow] direction: expected three components, got " +
                          std::to_string(comps.size()));
    }
    return Vec3(comps[0], comps[1], comps[2]);
}

std::string rank_to_string(const RankPolicy& policy) {
    return policy.kind == RankPolicy::Kind::Fixed ? "fixed:" + std::to_string(policy.rank)
                                                  : "energy:" + format_double(policy.energy_fraction);
}

std::string kernel_to_string(const RbfKernel& kernel) {
    switch (kernel.family) {
        case RbfKernel::Family::Multiquadric:
            return "multiquadric:" + format_double(kernel.epsilon);
        case RbfKernel::Family::Gaussian:
            return "gaussian:" + format_double(kernel.epsilon);
        default:
            return "thin-plate";
    }
}

std::string optional_to_string(const std::optional<double>& v) {
    return v ? format_double(*v) : "none";
}

// ---------------------------------------------------------------------------
// workspace artifacts

json parse_json_file(const fs::path& path, const std::string& what) {
    const std::string text = read_text_file(path);
    try {
        return json::parse(text);
    } catch (const json::exception& e) {
        throw ParseError(what + ": " + e.what());
    }
}

void write_json_file(const fs::path& path, const json& j) {
    write_text_file(path, j.dump(2) + "\n");
}

json vector_to_json(const Vector& v) {
    json out = json::array();
    for (int i = 0; i < v.size(); ++i) {
        out.push_back(v[i]);
    }
    return out;
}

Vector json_to_vector(const json& j, const std::string& what) {
    if (!j.is_array()) {
        throw ParseError(what + ": expected an array of numbers");
    }
    Vector v(j.size());
    for (std::size_t i = 0; i < j.size(); ++i) {
        if (!j[i].is_number()) {
            throw ParseError(what + ": expected an array of numbers");
        }
        v[static_cast<int>(i)] = j[i].get<double>();
    }
    return v;
}

bool bitwise_equal(const Vector& a, const Vector& b) {
    if (a.size() != b.size()) {
        return false;
    }
    for (int i = 0; i < a.size(); ++i) {
        if (a[i] != b[i]) {
            return false;
        }
    }
    return true;
}

fs::path sample_dir(const fs::path& workspace, int index) {
    return workspace / ("sample_" + std::to_string(index));
}

std::string sample_name(int index) { return "sample_" + std::to_string(index); }

struct SampleEntry {
    int index = 0;
    Vector mu;
    bool extra = false;
};

struct Registry {
    Box box;
    std::uint64_t seed = 0;
    int interior = 0;
    std::vector<SampleEntry> entries;
    int doe_count = 0;
};

json registry_to_json(const Registry& reg) {
    json j;
    json lo = json::array(), hi = json::array();
    for (int k = 0; k < reg.box.dim(); ++k) {
        lo.push_back(reg.box.lo[k]);
        hi.push_back(reg.box.hi[k]);
    }
    j["box"] = {{"lo", lo}, {"hi", hi}};
    j["dim"] = reg.box.dim();
    j["interior"] = reg.interior;
    j["seed"] = reg.seed;
    json points = json::array();
    json extra = json::array();
    for (const SampleEntry& e : reg.entries) {
        if (e.extra) {
            extra.push_back({{"index", e.index}, {"mu", vector_to_json(e.mu)}});
        } else {
            points.push_back(vector_to_json(e.mu));
        }
    }
    j["points"] = points;
    j["extra"] = extra;
    return j;
}

Registry registry_from_json(const json& j, const std::string& what) {
    Registry reg;
    try {
        reg.box.lo = json_to_vector(j.at("box").at("lo"), what + " box.lo");
        reg.box.hi = json_to_vector(j.at("box").at("hi"), what + " box.hi");
        reg.seed = j.at("seed").get<std::uint64_t>();
        reg.interior = j.at("interior").get<int>();
        const json& points = j.at("points");
        const json& extra = j.at("extra");
        if (!points.is_array() || !extra.is_array()) {
            throw ParseError(what + ": points and extra must be arrays");
        }
        int index = 0;
        for (const json& p : points) {
            reg.entries.push_back({index++, json_to_vector(p, what + " point"), false});
        }
        reg.doe_count = index;
        for (const json& e : extra) {
            SampleEntry entry;
            entry.index = e.at("index").get<int>();
            entry.mu = json_to_vector(e.at("mu"), what + " extra mu");
            entry.extra = true;
            if (entry.index != index++) {
                throw ParseError(what + ": extra sample indices must continue the DOE numbering");
            }
            reg.entries.push_back(std::move(entry));
        }
    } catch (const json::exception& e) {
        throw ParseError(what + ": " + e.what());
    }
    return reg;
}

Registry fresh_registry(const StudyConfig& config, const FfdParameterization& param) {
    const DoePlan plan = make_doe(param.bounds, param.param_dim(), config.doe_interior,
                                  config.doe_seed);
    Registry reg;
    reg.box = plan.box;
    reg.seed = plan.seed;
    reg.interior = static_cast<int>(plan.interior.rows());
    const Matrix points = plan.all_points();
    for (int i = 0; i < points.rows(); ++i) {
        reg.entries.push_back({i, points.row(i).transpose(), false});
    }
    reg.doe_count = static_cast<int>(points.rows());
    return reg;
}

/// Loads doe.json and cross-checks it against the effective configuration,
/// so every command works from the same plan that produced the database.
Registry load_registry(const StudyConfig& config, const FfdParameterization& param) {
    const fs::path path = config.workspace / "doe.json";
    if (!fs::exists(path)) {
        throw Error("doe.json not found in " + config.workspace.string() +
                    "; run the sample command first");
    }
    Registry reg = registry_from_json(parse_json_file(path, "doe.json"), "doe.json");
    const Registry expect = fresh_registry(config, param);
    const auto mismatch = [&](const std::string& field) {
        throw Error("doe.json does not match the configuration (" + field +
                    "); re-run the sample command or pass the overrides used to create it");
    };
    if (reg.seed != expect.seed) {
        mismatch("seed");
    }
    if (reg.interior != expect.interior) {
        mismatch("interior count");
    }
    if (!bitwise_equal(reg.box.lo, expect.box.lo) || !bitwise_equal(reg.box.hi, expect.box.hi)) {
        mismatch("parameter box");
    }
    if (reg.doe_count != expect.doe_count) {
        mismatch("point count");
    }
    for (int i = 0; i < reg.doe_count; ++i) {
        if (!bitwise_equal(reg.entries[i].mu, expect.entries[i].mu)) {
            mismatch("point " + std::to_string(i));
        }
    }
    return reg;
}

std::vector<std::string> layout_names(const std::vector<LayoutEntry>& layout) {
    std::vector<std::string> names;
    names.reserve(layout.size());
    for (const LayoutEntry& e : layout) {
        names.push_back(e.name);
    }
    return names;
}

bool layout_equal(const std::vector<LayoutEntry>& a, const std::vector<LayoutEntry>& b) {
    if (a.size() != b.size()) {
        return false;
    }
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i].name != b[i].name || a[i].kind != b[i].kind) {
            return false;
        }
    }
    return true;
}

/// Produces every artifact of one sample; the status marker is written
/// last, so an interrupted sample is retried on resume.
void process_sample(const StudyConfig& config, const FfdParameterization& param,
                    const TriMesh& base, const SolverRegistry& solvers, int index,
                    const Vector& mu, const fs::path& dir) {
    fs::create_directories(dir);
    fs::remove(dir / "status.json");

    json jmu;
    jmu["index"] = index;
    jmu["mu"] = vector_to_json(mu);
    write_json_file(dir / "mu.json", jmu);

    const TriMesh deformed = deform_mesh(param, base, mu, /*strict_bounds=*/true);
    save_stl(deformed, dir / "deformed.stl", StlFormat::Ascii);

    FomRequest request(deformed, mu);
    request.t_start = config.t_start;
    request.t_end = config.t_end;
    request.count = config.snapshot_count;
    const FomResult result = run_fom(solvers, config.solver_id, request);

    std::vector<StateVector> steps;
    steps.reserve(result.series.count());
    for (int k = 0; k < result.series.count(); ++k) {
        steps.push_back({result.series.states.col(k), result.layout});
    }
    save_snapshot_series(dir / "series", deformed, steps, result.series.t0, result.series.dt);

    const DmdModel model = fit_dmd(result.series, config.dmd_rank);
    const RegimeResult regime =
        regime_state(model, config.dmd_horizon, config.dmd_eta, config.dmd_steady_only);
    const TriMesh flow_mesh = unflatten_fields(deformed, {regime.state, result.layout});
    save_fields_csv(flow_mesh, layout_names(result.layout), dir / "regime.csv");

    const double resistance = integrate_resistance(flow_mesh, config.flow, config.direction);
    json jres;
    jres["resistance"] = resistance;
    jres["coefficient"] = resistance_coefficient(resistance, config.flow);
    jres["direction"] = {config.direction.x(), config.direction.y(), config.direction.z()};
    write_json_file(dir / "resistance.json", jres);

    json status;
    status["status"] = "done";
    write_json_file(dir / "status.json", status);
}

std::optional<std::string> sample_status(const fs::path& dir) {
    const fs::path path = dir / "status.json";
    if (!fs::exists(path)) {
        return std::nullopt;
    }
    const json j = parse_json_file(path, path.string());
    if (!j.contains("status") || !j["status"].is_string()) {
        throw ParseError(path.string() + ": missing status field");
    }
    return j["status"].get<std::string>();
}

std::vector<SampleEntry> select_entries(const Registry& reg,
                                        const std::optional<SampleRange>& range) {
    if (!range) {
        return reg.entries;
    }
    const int last = static_cast<int>(reg.entries.size()) - 1;
    if (range->first < 0 || range->second < range->first || range->second > last) {
        throw Error("sample range " + std::to_string(range->first) + ".." +
                    std::to_string(range->second) + " is outside 0.." + std::to_string(last));
    }
    std::vector<SampleEntry> picked;
    for (const SampleEntry& e : reg.entries) {
        if (e.index >= range->first && e.index <= range->second) {
            picked.push_back(e);
        }
    }
    return picked;
}

struct LoadedStudy {
    FfdParameterization param;
    TriMesh base;
};

LoadedStudy load_study_inputs(const StudyConfig& config) {
    LoadedStudy study{load_ffd_json(config.parameterization), load_stl(config.base_mesh)};
    study.param.validate();
    return study;
}

LoadedRom load_checked_rom(const StudyConfig& config) {
    const fs::path path = config.workspace / "rom.bin";
    if (!fs::exists(path)) {
        throw Error("rom.bin not found in " + config.workspace.string() +
                    "; run the build-rom command first");
    }
    LoadedRom loaded = load_rom_model(path);
    const std::string current = offline_config_hash(config);
    if (loaded.provenance.config_hash != current) {
        throw Error("rom.bin was built from configuration hash " + loaded.provenance.config_hash +
                    " but the current configuration hashes to " + current +
                    "; re-run build-rom");
    }
    return loaded;
}

}  // namespace

// ---------------------------------------------------------------------------
// configuration

void StudyConfig::validate() const {
    if (base_mesh.empty() || parameterization.empty() || workspace.empty()) {
        throw ConfigError("[paths] base_mesh, parameterization, and workspace are required");
    }
    if (solver_id.empty()) {
        throw ConfigError("[solver] id must not be empty");
    }
    if (!(t_start < t_end)) {
        throw ConfigError("[solver] t_start must be below t_end");
    }
    if (snapshot_count < 3) {
        throw ConfigError("[solver] snapshots must be at least 3");
    }
    if (doe_interior < 0) {
        throw ConfigError("[doe] interior must be non-negative");
    }
    const auto check_rank = [](const RankPolicy& policy, const std::string& where) {
        if (policy.kind == RankPolicy::Kind::Fixed) {
            if (policy.rank < 1) {
                throw ConfigError(where + " rank: fixed rank must be at least 1");
            }
        } else if (!(policy.energy_fraction > 0.0) || policy.energy_fraction > 1.0) {
            throw ConfigError(where + " rank: energy fraction must lie in (0, 1]");
        }
    };
    check_rank(dmd_rank, "[dmd]");
    check_rank(rom_rank, "[rom]");
    if (!(dmd_eta > 0.0)) {
        throw ConfigError("[dmd] eta must be positive");
    }
    if (dmd_horizon && *dmd_horizon < t_end) {
        throw ConfigError("[dmd] horizon must not precede the sampling window's end");
    }
    if (rom_kernel.epsilon < 0.0 || optimizer.kernel.epsilon < 0.0) {
        throw ConfigError("epsilon must be non-negative");
    }
    if ((rom_lambda && *rom_lambda < 0.0) ||
        (optimizer.lambda_reg && *optimizer.lambda_reg < 0.0)) {
        throw ConfigError("lambda must be non-negative");
    }
    if (optimizer.interior_count < 0) {
        throw ConfigError("[optimizer] interior must be non-negative");
    }
    if (optimizer.budget < 1) {
        throw ConfigError("[optimizer] budget must be at least 1");
    }
    if (!(optimizer.tol > 0.0)) {
        throw ConfigError("[optimizer] tol must be positive");
    }
    if (optimizer.stall_iterations < 1) {
        throw ConfigError("[optimizer] stall must be at least 1");
    }
    if (optimizer.polish_best < 0 || optimizer.polish_random < 0 ||
        optimizer.polish_best + optimizer.polish_random < 1) {
        throw ConfigError("[optimizer] polish starts must include at least one point");
    }
    try {
        flow.validate();
    } catch (const Error& e) {
        throw ConfigError(std::string("[flow] ") + e.what());
    }
    if (!(direction.norm() > 0.0) || !std::isfinite(direction.norm())) {
        throw ConfigError("[flow] direction must be a nonzero vector");
    }
}

StudyConfig load_study_config(const std::filesystem::path& path) {
    if (!fs::exists(path)) {
        throw ConfigError("config file not found: " + path.string());
    }
    const std::string ctx = path.filename().string();
    const RawConfig raw = parse_config_text(read_text_file(path), ctx);

    StudyConfig config;
    const fs::path dir = path.parent_path();
    const auto resolve = [&](const std::string& value) {
        const fs::path p(value);
        return p.is_absolute() ? p : dir / p;
    };
    config.base_mesh = resolve(require_value(raw, "paths", "base_mesh", ctx));
    config.parameterization = resolve(require_value(raw, "paths", "parameterization", ctx));
    config.workspace = resolve(require_value(raw, "paths", "workspace", ctx));

    if (const std::string* id = find_value(raw, "solver", "id")) {
        config.solver_id = *id;
    }
    config.t_start = value_or_double(raw, "solver", "t_start", config.t_start);
    config.t_end = value_or_double(raw, "solver", "t_end", config.t_end);
    config.snapshot_count =
        static_cast<int>(value_or_long(raw, "solver", "snapshots", config.snapshot_count));

    config.doe_interior = static_cast<int>(value_or_long(raw, "doe", "interior", config.doe_interior));
    config.doe_seed =
        static_cast<std::uint64_t>(value_or_long(raw, "doe", "seed", static_cast<long>(config.doe_seed)));

    config.dmd_rank = value_or_rank(raw, "dmd", config.dmd_rank);
    config.dmd_eta = value_or_double(raw, "dmd", "eta", config.dmd_eta);
    config.dmd_horizon = value_or_optional(raw, "dmd", "horizon");
    config.dmd_steady_only = value_or_bool(raw, "dmd", "steady_only", config.dmd_steady_only);

    config.rom_rank = value_or_rank(raw, "rom", config.rom_rank);
    config.rom_kernel = value_or_kernel(raw, "rom", config.rom_kernel);
    config.rom_lambda = value_or_optional(raw, "rom", "lambda");
    config.rom_center = value_or_bool(raw, "rom", "center", config.rom_center);

    config.optimizer.interior_count =
        static_cast<int>(value_or_long(raw, "optimizer", "interior", config.optimizer.interior_count));
    config.optimizer.budget =
        static_cast<int>(value_or_long(raw, "optimizer", "budget", config.optimizer.budget));
    config.optimizer.seed = static_cast<std::uint64_t>(
        value_or_long(raw, "optimizer", "seed", static_cast<long>(config.optimizer.seed)));
    config.optimizer.tol = value_or_double(raw, "optimizer", "tol", config.optimizer.tol);
    config.optimizer.stall_iterations = static_cast<int>(
        value_or_long(raw, "optimizer", "stall", config.optimizer.stall_iterations));
    config.optimizer.polish_best = static_cast<int>(
        value_or_long(raw, "optimizer", "polish_best", config.optimizer.polish_best));
    config.optimizer.polish_random = static_cast<int>(
        value_or_long(raw, "optimizer", "polish_random", config.optimizer.polish_random));
    config.optimizer.kernel = value_or_kernel(raw, "optimizer", config.optimizer.kernel);
    config.optimizer.lambda_reg = value_or_optional(raw, "optimizer", "lambda");

    config.flow.speed = value_or_double(raw, "flow", "speed", config.flow.speed);
    config.flow.density = value_or_double(raw, "flow", "density", config.flow.density);
    config.flow.reference_area =
        value_or_double(raw, "flow", "reference_area", config.flow.reference_area);
    config.flow.froude = value_or_double(raw, "flow", "froude", config.flow.froude);
    config.direction = value_or_direction(raw, config.direction);

    config.validate();
    config.direction.normalize();
    if (!fs::exists(config.base_mesh)) {
        throw ConfigError("base mesh not found: " + config.base_mesh.string());
    }
    if (!fs::exists(config.parameterization)) {
        throw ConfigError("parameterization not found: " + config.parameterization.string());
    }
    return config;
}

std::string offline_config_signature(const StudyConfig& config) {
    std::ostringstream out;
    out << "base_mesh_hash=" << hash_file_hex(config.base_mesh) << '\n';
    out << "parameterization_hash=" << hash_file_hex(config.parameterization) << '\n';
    out << "solver.id=" << config.solver_id << '\n';
    out << "solver.t_start=" << format_double(config.t_start) << '\n';
    out << "solver.t_end=" << format_double(config.t_end) << '\n';
    out << "solver.snapshots=" << config.snapshot_count << '\n';
    out << "doe.interior=" << config.doe_interior << '\n';
    out << "doe.seed=" << config.doe_seed << '\n';
    out << "dmd.rank=" << rank_to_string(config.dmd_rank) << '\n';
    out << "dmd.eta=" << format_double(config.dmd_eta) << '\n';
    out << "dmd.horizon=" << optional_to_string(config.dmd_horizon) << '\n';
    out << "dmd.steady_only=" << (config.dmd_steady_only ? "true" : "false") << '\n';
    out << "rom.rank=" << rank_to_string(config.rom_rank) << '\n';
    out << "rom.kernel=" << kernel_to_string(config.rom_kernel) << '\n';
    out << "rom.lambda=" << optional_to_string(config.rom_lambda) << '\n';
    out << "rom.center=" << (config.rom_center ? "true" : "false") << '\n';
    out << "flow.speed=" << format_double(config.flow.speed) << '\n';
    out << "flow.density=" << format_double(config.flow.density) << '\n';
    out << "flow.reference_area=" << format_double(config.flow.reference_area) << '\n';
    out << "flow.froude=" << format_double(config.flow.froude) << '\n';
    out << "flow.direction=" << format_double(config.direction.x()) << ' '
        << format_double(config.direction.y()) << ' ' << format_double(config.direction.z())
        << '\n';
    return out.str();
}

std::string offline_config_hash(const StudyConfig& config) {
    return fnv1a64_hex(offline_config_signature(config));
}

// ---------------------------------------------------------------------------
// commands

void cmd_sample(const StudyConfig& config) {
    const LoadedStudy study = load_study_inputs(config);
    Registry reg = fresh_registry(config, study.param);

    // Re-sampling must not lose enrichment records: carry the extra
    // entries over when the plan itself is unchanged.
    const fs::path path = config.workspace / "doe.json";
    if (fs::exists(path)) {
        try {
            const Registry old =
                registry_from_json(parse_json_file(path, "doe.json"), "doe.json");
            bool same_plan = old.seed == reg.seed && old.interior == reg.interior &&
                             old.doe_count == reg.doe_count &&
                             bitwise_equal(old.box.lo, reg.box.lo) &&
                             bitwise_equal(old.box.hi, reg.box.hi);
            for (int i = 0; same_plan && i < reg.doe_count; ++i) {
                same_plan = bitwise_equal(old.entries[i].mu, reg.entries[i].mu);
            }
            const std::size_t extras = old.entries.size() - old.doe_count;
            if (same_plan) {
                for (std::size_t i = old.doe_count; i < old.entries.size(); ++i) {
                    reg.entries.push_back(old.entries[i]);
                }
            } else if (extras > 0) {
                std::cerr << "[sample] plan changed: dropping " << extras
                          << " enrichment entries\n";
            }
        } catch (const std::exception&) {
            // unreadable registry: rewrite from scratch
        }
    }

    std::error_code ec;
    fs::create_directories(config.workspace, ec);
    if (ec) {
        throw IoError("cannot create workspace " + config.workspace.string() + ": " +
                      ec.message());
    }
    write_json_file(path, registry_to_json(reg));
    std::cerr << "[sample] doe.json: " << reg.entries.size() << " points ("
              << (reg.doe_count - reg.interior) << " corners)\n";
}

int cmd_offline(const StudyConfig& config, std::optional<SampleRange> range, int jobs) {
    const LoadedStudy study = load_study_inputs(config);
    const Registry reg = load_registry(config, study.param);
    const std::vector<SampleEntry> selected = select_entries(reg, range);
    const SolverRegistry solvers = default_solver_registry(config.flow);

    std::atomic<std::size_t> cursor{0};
    std::mutex log_mutex;
    std::vector<std::string> failures;
    int skipped = 0;

    auto worker = [&] {
        for (;;) {
            const std::size_t slot = cursor.fetch_add(1);
            if (slot >= selected.size()) {
                return;
            }
            const SampleEntry& entry = selected[slot];
            const fs::path dir = sample_dir(config.workspace, entry.index);
            try {
                if (sample_status(dir) == "done") {
                    const std::lock_guard<std::mutex> lock(log_mutex);
                    ++skipped;
                    continue;
                }
            } catch (const std::exception&) {
                // unreadable status: reprocess the sample
            }
            const auto t0 = std::chrono::steady_clock::now();
            try {
                process_sample(config, study.param, study.base, solvers, entry.index, entry.mu,
                               dir);
                const std::chrono::duration<double> dt = std::chrono::steady_clock::now() - t0;
                const std::lock_guard<std::mutex> lock(log_mutex);
                std::cerr << "[offline] " << sample_name(entry.index) << ": done ("
                          << dt.count() << " s)\n";
            } catch (const std::exception& e) {
                json status;
                status["status"] = "failed";
                status["error"] = std::string(e.what());
                try {
                    fs::create_directories(dir);
                    write_json_file(dir / "status.json", status);
                } catch (const std::exception&) {
                    // the failure is still reported through the return code
                }
                const std::lock_guard<std::mutex> lock(log_mutex);
                failures.push_back(sample_name(entry.index) + ": " + e.what());
                std::cerr << "[offline] " << sample_name(entry.index) << ": FAILED: " << e.what()
                          << "\n";
            }
        }
    };

    const int worker_count =
        std::max(1, std::min<int>(jobs, static_cast<int>(selected.size())));
    std::vector<std::thread> pool;
    pool.reserve(worker_count);
    for (int i = 0; i < worker_count; ++i) {
        pool.emplace_back(worker);
    }
    for (std::thread& t : pool) {
        t.join();
    }

    std::cerr << "[offline] " << (selected.size() - failures.size() - skipped) << " processed, "
              << skipped << " skipped, " << failures.size() << " failed\n";
    return static_cast<int>(failures.size());
}

void cmd_build_rom(const StudyConfig& config) {
    const LoadedStudy study = load_study_inputs(config);
    const Registry reg = load_registry(config, study.param);

    std::vector<std::string> missing;
    for (const SampleEntry& entry : reg.entries) {
        const fs::path dir = sample_dir(config.workspace, entry.index);
        std::optional<std::string> status;
        try {
            status = sample_status(dir);
        } catch (const std::exception&) {
        }
        if (status != "done" || !fs::exists(dir / "regime.csv")) {
            missing.push_back(sample_name(entry.index));
        }
    }
    if (!missing.empty()) {
        std::string joined;
        for (const std::string& name : missing) {
            joined += joined.empty() ? name : ", " + name;
        }
        throw Error("snapshot database incomplete: missing " + joined);
    }

    ParametricSnapshotSet set;
    set.params = Matrix(reg.entries.size(), reg.box.dim());
    RomProvenance provenance;
    provenance.config_hash = offline_config_hash(config);
    for (std::size_t i = 0; i < reg.entries.size(); ++i) {
        const SampleEntry& entry = reg.entries[i];
        const fs::path csv = sample_dir(config.workspace, entry.index) / "regime.csv";
        const std::vector<Field> fields = load_fields_csv(csv, study.base.vertex_count());
        std::vector<LayoutEntry> layout;
        int dim = 0;
        for (const Field& f : fields) {
            layout.push_back({f.name, f.kind});
            dim += static_cast<int>(f.values.size());
        }
        if (i == 0) {
            set.layout = layout;
            set.states = Matrix(dim, reg.entries.size());
        } else if (!layout_equal(layout, set.layout)) {
            throw Error(sample_name(entry.index) +
                        ": regime field layout differs from sample_" +
                        std::to_string(reg.entries.front().index));
        }
        int offset = 0;
        for (const Field& f : fields) {
            set.states.col(i).segment(offset, f.values.size()) = f.values;
            offset += static_cast<int>(f.values.size());
        }
        set.params.row(i) = entry.mu.transpose();
        provenance.sample_hashes.push_back(hash_file_hex(csv));
    }

    RomBuildOptions options;
    options.rank = config.rom_rank;
    options.kernel = config.rom_kernel;
    options.lambda_reg = config.rom_lambda;
    options.param_box = reg.box;
    options.center = config.rom_center;
    const RomModel model = build_rom(set, options);
    save_rom_model(model, config.workspace / "rom.bin", provenance);
    std::cerr << "[build-rom] rank " << model.rank() << " from " << set.sample_count()
              << " samples\n";
}

void cmd_optimize(const StudyConfig& config) {
    const LoadedRom loaded = load_checked_rom(config);
    const LoadedStudy study = load_study_inputs(config);

    RomOptimizationSettings settings;
    settings.surrogate = config.optimizer;
    settings.direction = config.direction;
    const OptimizationReport report =
        optimize_rom_resistance(loaded.model, study.param, study.base, config.flow, settings);

    json j;
    j["baseline_resistance"] = report.baseline_resistance;
    j["best_coefficient"] = resistance_coefficient(report.best_resistance, config.flow);
    j["best_mu"] = vector_to_json(report.best_mu);
    j["best_resistance"] = report.best_resistance;
    j["config_hash"] = loaded.provenance.config_hash;
    j["converged"] = report.converged;
    j["evaluations"] = report.trace.size();
    j["flat_objective"] = report.flat_objective;
    j["infill_iterations"] = report.iterations;
    j["percent_reduction"] = report.percent_reduction;
    write_json_file(config.workspace / "report.json", j);

    std::ostringstream csv;
    csv << "index,kind,failed,value,best_so_far";
    const int m = static_cast<int>(report.best_mu.size());
    for (int k = 0; k < m; ++k) {
        csv << ",mu_" << k;
    }
    csv << '\n';
    for (std::size_t i = 0; i < report.trace.size(); ++i) {
        const TraceRow& row = report.trace[i];
        csv << i << ',' << (row.kind == EvalKind::Doe ? "doe" : "infill") << ','
            << (row.failed ? 1 : 0) << ',' << format_double(row.value) << ','
            << format_double(row.best_so_far);
        for (int k = 0; k < row.mu.size(); ++k) {
            csv << ',' << format_double(row.mu[k]);
        }
        csv << '\n';
    }
    write_text_file(config.workspace / "trace.csv", csv.str());
    std::cerr << "[optimize] best resistance " << format_double(report.best_resistance) << " ("
              << format_double(report.percent_reduction) << "% below baseline)\n";
}

ValidationOutcome cmd_validate(const StudyConfig& config, const Vector& mu, bool enrich) {
    const LoadedRom loaded = load_checked_rom(config);
    if (mu.size() != loaded.model.param_dim()) {
        throw Error("validation point has dimension " + std::to_string(mu.size()) +
                    " but the rom expects " + std::to_string(loaded.model.param_dim()));
    }
    const LoadedStudy study = load_study_inputs(config);
    const SolverRegistry solvers = default_solver_registry(config.flow);

    const TriMesh deformed = deform_mesh(study.param, study.base, mu);
    FomRequest request(deformed, mu);
    request.t_start = config.t_start;
    request.t_end = config.t_end;
    request.count = config.snapshot_count;
    const FomResult result = run_fom(solvers, config.solver_id, request);
    const DmdModel model = fit_dmd(result.series, config.dmd_rank);
    const RegimeResult regime =
        regime_state(model, config.dmd_horizon, config.dmd_eta, config.dmd_steady_only);
    const TriMesh fom_mesh = unflatten_fields(deformed, {regime.state, result.layout});
    const double fom_resistance = integrate_resistance(fom_mesh, config.flow, config.direction);

    const Vector predicted = rom_predict(loaded.model, mu);
    const TriMesh rom_mesh = unflatten_fields(deformed, {predicted, loaded.model.layout});
    const double rom_resistance = integrate_resistance(rom_mesh, config.flow, config.direction);

    ValidationOutcome outcome;
    outcome.mu = mu;
    outcome.rom_resistance = rom_resistance;
    outcome.fom_resistance = fom_resistance;
    outcome.relative_error = fom_resistance == 0.0
                                 ? std::abs(rom_resistance - fom_resistance)
                                 : std::abs(rom_resistance - fom_resistance) / std::abs(fom_resistance);

    if (enrich) {
        Registry reg = load_registry(config, study.param);
        for (const SampleEntry& entry : reg.entries) {
            if (bitwise_equal(entry.mu, mu)) {
                throw Error("the validation point is already in the database as " +
                            sample_name(entry.index) + "; refusing to enrich");
            }
        }
        const int index = static_cast<int>(reg.entries.size());
        process_sample(config, study.param, study.base, solvers, index, mu,
                       sample_dir(config.workspace, index));
        reg.entries.push_back({index, mu, true});
        write_json_file(config.workspace / "doe.json", registry_to_json(reg));
        outcome.enriched = true;
        outcome.sample_index = index;
        std::cerr << "[validate] database enriched with " << sample_name(index) << "\n";
    }

    json j;
    j["enriched"] = outcome.enriched;
    j["fom_resistance"] = outcome.fom_resistance;
    j["mu"] = vector_to_json(outcome.mu);
    j["relative_error"] = outcome.relative_error;
    j["rom_resistance"] = outcome.rom_resistance;
    j["sample_index"] = outcome.sample_index;
    write_json_file(config.workspace / "validation.json", j);
    std::cerr << "[validate] rom " << format_double(rom_resistance) << " vs fom "
              << format_double(fom_resistance) << " (relative error "
              << format_double(outcome.relative_error) << ")\n";
    return outcome;
}

Vector report_best_mu(const StudyConfig& config) {
    const fs::path path = config.workspace / "report.json";
    if (!fs::exists(path)) {
        throw Error("report.json not found in " + config.workspace.string() +
                    "; run the optimize command first");
    }
    const json j = parse_json_file(path, "report.json");
    try {
        const std::string stamp = j.at("config_hash").get<std::string>();
        const std::string current = offline_config_hash(config);
        if (stamp != current) {
            throw Error("report.json carries configuration hash " + stamp +
                        " but the current configuration hashes to " + current +
                        "; re-run optimize");
        }
        return json_to_vector(j.at("best_mu"), "report.json best_mu");
    } catch (const json::exception& e) {
        throw ParseError(std::string("report.json: ") + e.what());
    }
}

std::vector<std::string> cmd_check(const StudyConfig& config) {
    std::vector<std::string> problems;
    const auto fail = [&](const std::string& msg) { problems.push_back(msg); };

    std::optional<LoadedStudy> inputs;
    try {
        inputs = load_study_inputs(config);
    } catch (const std::exception& e) {
        fail(std::string("study inputs: ") + e.what());
        return problems;
    }
    const LoadedStudy& study = *inputs;

    const fs::path doe_path = config.workspace / "doe.json";
    if (!fs::exists(doe_path)) {
        fail("doe.json: missing; run the sample command");
        return problems;
    }
    Registry reg;
    try {
        reg = load_registry(config, study.param);
    } catch (const std::exception& e) {
        fail(std::string("doe.json: ") + e.what());
        return problems;
    }

    std::vector<LayoutEntry> layout;
    int layout_from = -1;
    std::vector<std::string> regime_hashes(reg.entries.size());
    for (std::size_t i = 0; i < reg.entries.size(); ++i) {
        const SampleEntry& entry = reg.entries[i];
        const std::string name = sample_name(entry.index);
        const fs::path dir = sample_dir(config.workspace, entry.index);
        if (!fs::exists(dir)) {
            fail(name + ": directory missing");
            continue;
        }
        std::optional<std::string> status;
        try {
            status = sample_status(dir);
        } catch (const std::exception& e) {
            fail(name + ": " + e.what());
            continue;
        }
        if (!status) {
            fail(name + ": incomplete (no status file)");
            continue;
        }
        if (*status == "failed") {
            std::string detail = "failed";
            try {
                const json j = parse_json_file(dir / "status.json", name);
                if (j.contains("error")) {
                    detail += ": " + j["error"].get<std::string>();
                }
            } catch (const std::exception&) {
            }
            fail(name + ": " + detail);
            continue;
        }
        if (*status != "done") {
            fail(name + ": unknown status '" + *status + "'");
            continue;
        }

        try {
            const json jmu = parse_json_file(dir / "mu.json", name + "/mu.json");
            if (jmu.at("index").get<int>() != entry.index ||
                !bitwise_equal(json_to_vector(jmu.at("mu"), name + "/mu.json"), entry.mu)) {
                fail(name + "/mu.json: does not match doe.json");
            }
        } catch (const std::exception& e) {
            fail(name + "/mu.json: " + e.what());
        }

        try {
            const TriMesh stored = load_stl(dir / "deformed.stl");
            if (stored.vertex_count() != study.base.vertex_count() ||
                stored.face_count() != study.base.face_count()) {
                fail(name + "/deformed.stl: vertex or face count differs from the base mesh");
            }
        } catch (const std::exception& e) {
            fail(name + "/deformed.stl: " + e.what());
        }

        try {
            const SeriesOnDisk series = load_snapshot_series(dir / "series");
            if (series.series.count() != config.snapshot_count) {
                fail(name + "/series: " + std::to_string(series.series.count()) +
                     " snapshots, expected " + std::to_string(config.snapshot_count));
            }
            if (series.series.t0 != config.t_start) {
                fail(name + "/series: window starts at " + format_double(series.series.t0) +
                     ", expected " + format_double(config.t_start));
            }
            if (series.vertex_count != study.base.vertex_count()) {
                fail(name + "/series: vertex count differs from the base mesh");
            }
        } catch (const std::exception& e) {
            fail(name + "/series: " + e.what());
        }

        const fs::path csv = dir / "regime.csv";
        if (fs::exists(csv)) {
            regime_hashes[i] = hash_file_hex(csv);
        }
        try {
            const std::vector<Field> fields = load_fields_csv(csv, study.base.vertex_count());
            std::vector<LayoutEntry> this_layout;
            for (const Field& f : fields) {
                this_layout.push_back({f.name, f.kind});
            }
            if (layout_from < 0) {
                layout = this_layout;
                layout_from = entry.index;
            } else if (!layout_equal(layout, this_layout)) {
                fail(name + "/regime.csv: field layout differs from sample_" +
                     std::to_string(layout_from));
            }

            const json jres = parse_json_file(dir / "resistance.json", name + "/resistance.json");
            TriMesh flow_mesh = deform_mesh(study.param, study.base, entry.mu);
            for (const Field& f : fields) {
                flow_mesh = flow_mesh.with_field(f);
            }
            const double expect =
                integrate_resistance(flow_mesh, config.flow, config.direction);
            if (jres.at("resistance").get<double>() != expect) {
                fail(name + "/resistance.json: stored resistance does not match the regime "
                            "fields");
            }
        } catch (const std::exception& e) {
            fail(name + "/regime.csv: " + e.what());
        }
    }

    const fs::path rom_path = config.workspace / "rom.bin";
    std::string rom_hash;
    if (fs::exists(rom_path)) {
        try {
            const LoadedRom loaded = load_rom_model(rom_path);
            rom_hash = loaded.provenance.config_hash;
            const std::string current = offline_config_hash(config);
            if (loaded.provenance.config_hash != current) {
                fail("rom.bin: built from configuration hash " + loaded.provenance.config_hash +
                     ", current is " + current);
            }
            if (loaded.provenance.sample_hashes.size() != reg.entries.size()) {
                fail("rom.bin: built from " +
                     std::to_string(loaded.provenance.sample_hashes.size()) +
                     " samples, database has " + std::to_string(reg.entries.size()));
            } else {
                for (std::size_t i = 0; i < reg.entries.size(); ++i) {
                    if (!regime_hashes[i].empty() &&
                        loaded.provenance.sample_hashes[i] != regime_hashes[i]) {
                        fail("rom.bin: " + sample_name(reg.entries[i].index) +
                             " regime state changed since the model was built");
                    }
                }
            }
        } catch (const std::exception& e) {
            fail(std::string("rom.bin: ") + e.what());
        }
    }

    const fs::path report_path = config.workspace / "report.json";
    if (fs::exists(report_path)) {
        try {
            const json j = parse_json_file(report_path, "report.json");
            const std::string stamp = j.at("config_hash").get<std::string>();
            if (rom_hash.empty()) {
                fail("report.json: present without rom.bin");
            } else if (stamp != rom_hash) {
                fail("report.json: configuration hash " + stamp +
                     " does not match rom.bin's " + rom_hash);
            }
            if (json_to_vector(j.at("best_mu"), "report.json best_mu").size() !=
                reg.box.dim()) {
                fail("report.json: best_mu dimension differs from the parameter box");
            }
            if (!fs::exists(config.workspace / "trace.csv")) {
                fail("trace.csv: missing next to report.json");
            }
        } catch (const std::exception& e) {
            fail(std::string("report.json: ") + e.what());
        }
    }

    const fs::path validation_path = config.workspace / "validation.json";
    if (fs::exists(validation_path)) {
        try {
            parse_json_file(validation_path, "validation.json");
        } catch (const std::exception& e) {
            fail(std::string("validation.json: ") + e.what());
        }
    }

    return problems;
}

void cmd_spectrum(const StudyConfig& config, std::optional<SampleRange> range) {
    const LoadedStudy study = load_study_inputs(config);
    const Registry reg = load_registry(config, study.param);
    for (const SampleEntry& entry : select_entries(reg, range)) {
        const fs::path dir = sample_dir(config.workspace, entry.index);
        if (sample_status(dir) != "done") {
            std::cerr << "[spectrum] " << sample_name(entry.index) << ": not complete, skipped\n";
            continue;
        }
        const SeriesOnDisk series = load_snapshot_series(dir / "series");
        const DmdModel model = fit_dmd(series.series, config.dmd_rank);
        std::ostringstream csv;
        csv << "mode,real,imag,magnitude,amplitude\n";
        for (int i = 0; i < model.rank(); ++i) {
            csv << i << ',' << format_double(model.eigenvalues[i].real()) << ','
                << format_double(model.eigenvalues[i].imag()) << ','
                << format_double(std::abs(model.eigenvalues[i])) << ','
                << format_double(std::abs(model.amplitudes[i])) << '\n';
        }
        write_text_file(dir / "spectrum.csv", csv.str());
    }
}

void cmd_energy(const StudyConfig& config) {
    const LoadedRom loaded = load_checked_rom(config);
    const Vector cumulative = pod_energy(loaded.model);
    const Vector& sigma = loaded.model.singular_values;
    const double total = sigma.squaredNorm();
    std::ostringstream csv;
    csv << "mode,sigma,energy_fraction,cumulative_energy\n";
    for (int i = 0; i < sigma.size(); ++i) {
        const double fraction = total > 0.0 ? sigma[i] * sigma[i] / total : 0.0;
        csv << i << ',' << format_double(sigma[i]) << ',' << format_double(fraction) << ','
            << format_double(cumulative[i]) << '\n';
    }
    write_text_file(config.workspace / "energy.csv", csv.str());
}

std::filesystem::path scaffold_demo_study(const std::filesystem::path& dir,
                                          const DemoStudyOptions& options) {
    fs::create_directories(dir);
    save_stl(synthetic_hull(options.hull_level), dir / "hull.stl", StlFormat::Ascii);

    FfdParameterization param;
    param.lattice = FfdLattice::make(Vec3(1.6, -0.7, -0.55),
                                     {Vec3(1.7, 0, 0), Vec3(0, 1.4, 0), Vec3(0, 0, 1.1)},
                                     {3, 3, 3});
    param.dof_map = {
        {2, 1, 1, Vec3(1, 0, 0)},
        {1, 1, 1, Vec3(0, 1, 0)},
        {2, 1, 1, Vec3(0, 0, 1)},
        {1, 2, 1, Vec3(0, 1, 0)},
        {1, 1, 2, Vec3(0, 0, 1)},
    };
    param.bounds.lo = Vector::Constant(5, -options.half_width);
    param.bounds.hi = Vector::Constant(5, options.half_width);
    param.validate();
    save_ffd_json(param, dir / "bulb.json");

    std::ostringstream cfg;
    cfg << "# Bow-bulb resistance study on the synthetic hull.\n\n";
    cfg << "[paths]\n";
    cfg << "base_mesh = hull.stl\n";
    cfg << "parameterization = bulb.json\n";
    cfg << "workspace = workspace\n\n";
    cfg << "[solver]\n";
    cfg << "id = synthetic-lti\n";
    cfg << "t_start = 50\n";
    cfg << "t_end = 60\n";
    cfg << "snapshots = 20\n\n";
    cfg << "[doe]\n";
    cfg << "interior = " << options.doe_interior << "\n";
    cfg << "seed = " << options.doe_seed << "\n\n";
    cfg << "[dmd]\n";
    cfg << "rank = fixed:7\n";
    cfg << "eta = 1e-6\n";
    cfg << "steady_only = true\n\n";
    cfg << "[rom]\n";
    cfg << "rank = energy:0.999\n\n";
    cfg << "[optimizer]\n";
    cfg << "interior = 30\n";
    cfg << "budget = 200\n";
    cfg << "seed = " << options.optimizer_seed << "\n\n";
    cfg << "[flow]\n";
    cfg << "direction = 1 0 0\n";
    const fs::path cfg_path = dir / "study.cfg";
    write_text_file(cfg_path, cfg.str());
    return cfg_path;
}

}  // namespace romopt
