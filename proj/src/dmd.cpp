#include "romopt/dmd.hpp"

#include "romopt/io_util.hpp"
#include "romopt/linalg.hpp"

#include <Eigen/QR>

#include <json.hpp>

#include <cmath>
#include <complex>
#include <cstdio>

namespace romopt {

namespace {

/// λ^s on the principal branch, with the endpoint cases pinned so that
/// s = 0 is exactly 1 and a zero eigenvalue never produces NaN.
std::complex<double> eigen_power(std::complex<double> lambda, double s) {
    if (s == 0.0) {
        return {1.0, 0.0};
    }
    if (lambda == std::complex<double>(0.0, 0.0)) {
        return {0.0, 0.0};
    }
    return std::pow(lambda, s);
}

CVector modal_factors(const DmdModel& model, double t) {
    const double s = (t - model.t0) / model.dt;
    CVector f(model.rank());
    for (int i = 0; i < model.rank(); ++i) {
        f[i] = eigen_power(model.eigenvalues[i], s) * model.amplitudes[i];
    }
    return f;
}

}  // namespace

void SnapshotSeries::validate() const {
    if (count() < 3) {
        throw Error("snapshot series needs at least 3 columns, has " + std::to_string(count()));
    }
    if (!(dt > 0.0)) {
        throw Error("snapshot series dt must be positive");
    }
    if (!states.allFinite()) {
        throw Error("snapshot series has non-finite entries");
    }
}

DmdModel fit_dmd(const SnapshotSeries& series, const RankPolicy& policy) {
    series.validate();
    const int m = series.count();
    if (policy.kind == RankPolicy::Kind::Fixed && policy.rank > m - 1) {
        throw Error("requested rank " + std::to_string(policy.rank) + " exceeds m-1 = " +
                    std::to_string(m - 1));
    }
    Matrix x = series.states.leftCols(m - 1);
    Matrix y = series.states.rightCols(m - 1);
    if (x.norm() == 0.0) {
        throw Error("snapshot matrix X is zero");
    }

    TruncatedSvd svd = truncated_svd(x, policy);
    const int r = svd.rank();
    for (int i = 0; i < r; ++i) {
        if (svd.sigma[i] <= 1e-14 * svd.sigma[0]) {
            throw Error("requested rank " + std::to_string(r) +
                        " exceeds the numerical rank of the snapshot matrix");
        }
    }

    // Y·V·Σ⁻¹ appears both in the projected operator and in the exact
    // modes, so form it once.
    Matrix yvs = y * svd.v;
    for (int i = 0; i < r; ++i) {
        yvs.col(i) /= svd.sigma[i];
    }
    Matrix a_tilde = svd.u.transpose() * yvs;
    EigResult eig = eig_dense(a_tilde);

    DmdModel model;
    model.modes = yvs.cast<std::complex<double>>() * eig.vectors;
    model.eigenvalues = eig.values;
    model.dt = series.dt;
    model.t0 = series.t0;
    model.snapshot_count = m;

    CVector x1 = series.states.col(0).cast<std::complex<double>>();
    model.amplitudes = Eigen::ColPivHouseholderQR<CMatrix>(model.modes).solve(x1);

    double worst = 0.0;
    for (int k = 0; k < m; ++k) {
        Vector xk = series.states.col(k);
        Vector hat = reconstruct(model, series.t0 + k * series.dt);
        double denom = xk.norm();
        double err = (hat - xk).norm();
        worst = std::max(worst, denom > 0.0 ? err / denom : err);
    }
    model.training_residual = worst;
    return model;
}

Vector reconstruct(const DmdModel& model, double t) {
    if (t < model.t0) {
        throw Error("reconstruction time " + format_double(t) + " precedes t0 = " +
                    format_double(model.t0));
    }
    return (model.modes * modal_factors(model, t)).real();
}

bool dmd_is_extrapolating(const DmdModel& model, double t) {
    return t > model.end_time();
}

RegimeResult regime_state(const DmdModel& model, std::optional<double> horizon, double eta,
                          bool steady_only) {
    const double h = horizon ? *horizon : model.t0 + 10.0 * model.window();
    if (h < model.end_time()) {
        throw Error("regime horizon " + format_double(h) + " precedes the training end " +
                    format_double(model.end_time()));
    }
    RegimeResult out;
    CVector factors = modal_factors(model, h);
    CVector kept = CVector::Zero(model.rank());
    int included = 0;
    for (int i = 0; i < model.rank(); ++i) {
        const double mag = std::abs(model.eigenvalues[i]);
        const bool keep = steady_only ? std::abs(model.eigenvalues[i] - std::complex<double>(1.0, 0.0)) <= eta
                                      : mag <= 1.0 + eta;
        if (keep) {
            kept[i] = factors[i];
            ++included;
        } else {
            out.excluded_modes.push_back(i);
        }
    }
    if (included == 0) {
        throw Error("no stable dynamics: every mode exceeded the stability tolerance");
    }
    out.state = (model.modes * kept).real();
    return out;
}

namespace {

using nlohmann::json;

constexpr char kMagic[9] = "ROMOPTB1";

void append_blob(std::string& out, const double* data, long count) {
    for (long i = 0; i < count; ++i) {
        append_f64_le(out, data[i]);
    }
}

}  // namespace

void save_dmd_model(const DmdModel& model, const std::filesystem::path& path) {
    const int n = model.dim();
    const int r = model.rank();
    json header;
    header["kind"] = "dmd";
    header["rows"] = n;
    header["rank"] = r;
    header["dt"] = model.dt;
    header["t0"] = model.t0;
    header["snapshot_count"] = model.snapshot_count;
    header["residual"] = model.training_residual;
    header["eigenvalues"] = json::array();
    for (int i = 0; i < r; ++i) {
        header["eigenvalues"].push_back({model.eigenvalues[i].real(), model.eigenvalues[i].imag()});
    }
    header["blobs"] = {"modes_re", "modes_im", "amplitudes_re", "amplitudes_im"};
    const std::string head = header.dump();

    std::string out;
    out.append(kMagic, 8);
    append_u64_le(out, head.size());
    out += head;
    Matrix mre = model.modes.real();
    Matrix mim = model.modes.imag();
    Vector are = model.amplitudes.real();
    Vector aim = model.amplitudes.imag();
    append_blob(out, mre.data(), static_cast<long>(n) * r);
    append_blob(out, mim.data(), static_cast<long>(n) * r);
    append_blob(out, are.data(), r);
    append_blob(out, aim.data(), r);
    write_binary_file(path, out.data(), out.size());
}

DmdModel load_dmd_model(const std::filesystem::path& path) {
    const auto bytes = read_binary_file(path);
    const std::string origin = path.string();
    if (bytes.size() < 16 || std::memcmp(bytes.data(), kMagic, 8) != 0) {
        throw ParseError(origin + ": missing ROMOPTB1 magic");
    }
    const std::uint64_t head_len = read_u64_le(bytes.data() + 8);
    if (16 + head_len > bytes.size()) {
        throw ParseError(origin + ": header length exceeds file size");
    }
    json header;
    try {
        header = json::parse(bytes.begin() + 16, bytes.begin() + 16 + head_len);
    } catch (const json::parse_error& e) {
        throw ParseError(origin + ": bad header: " + e.what());
    }
    if (header.value("kind", "") != "dmd") {
        throw ParseError(origin + ": not a dmd model (kind = '" +
                         header.value("kind", "") + "')");
    }
    DmdModel model;
    const int n = header.at("rows").get<int>();
    const int r = header.at("rank").get<int>();
    model.dt = header.at("dt").get<double>();
    model.t0 = header.at("t0").get<double>();
    model.snapshot_count = header.at("snapshot_count").get<int>();
    model.training_residual = header.at("residual").get<double>();
    if (n < 1 || r < 1) {
        throw ParseError(origin + ": invalid dimensions");
    }
    const auto& eigs = header.at("eigenvalues");
    if (static_cast<int>(eigs.size()) != r) {
        throw ParseError(origin + ": eigenvalue count does not match rank");
    }
    model.eigenvalues.resize(r);
    for (int i = 0; i < r; ++i) {
        model.eigenvalues[i] = {eigs[i][0].get<double>(), eigs[i][1].get<double>()};
    }
    const std::size_t payload = bytes.size() - 16 - head_len;
    const std::size_t expected = sizeof(double) * (2ull * n * r + 2ull * r);
    if (payload != expected) {
        throw ParseError(origin + ": payload is " + std::to_string(payload) + " bytes, expected " +
                         std::to_string(expected));
    }
    const std::uint8_t* p = bytes.data() + 16 + head_len;
    Matrix mre(n, r), mim(n, r);
    for (long i = 0; i < static_cast<long>(n) * r; ++i, p += 8) {
        mre.data()[i] = read_f64_le(p);
    }
    for (long i = 0; i < static_cast<long>(n) * r; ++i, p += 8) {
        mim.data()[i] = read_f64_le(p);
    }
    Vector are(r), aim(r);
    for (int i = 0; i < r; ++i, p += 8) {
        are[i] = read_f64_le(p);
    }
    for (int i = 0; i < r; ++i, p += 8) {
        aim[i] = read_f64_le(p);
    }
    model.modes = mre.cast<std::complex<double>>() +
                  std::complex<double>(0.0, 1.0) * mim.cast<std::complex<double>>();
    model.amplitudes = are.cast<std::complex<double>>() +
                       std::complex<double>(0.0, 1.0) * aim.cast<std::complex<double>>();
    return model;
}

namespace {

std::string step_file_name(int index) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "step_%04d.csv", index);
    return buf;
}

FieldKind kind_from_string(const std::string& s, const std::string& origin) {
    if (s == "scalar") return FieldKind::Scalar;
    if (s == "vector3") return FieldKind::Vector3;
    throw ParseError(origin + ": unknown field kind '" + s + "'");
}

}  // namespace

void save_snapshot_series(const std::filesystem::path& dir, const TriMesh& mesh,
                          const std::vector<StateVector>& steps, double t0, double dt) {
    if (steps.empty()) {
        throw Error("snapshot series has no steps");
    }
    if (!(dt > 0.0)) {
        throw Error("snapshot series dt must be positive");
    }
    std::filesystem::create_directories(dir);
    const auto& layout = steps.front().layout;
    std::vector<std::string> names;
    for (const auto& entry : layout) {
        names.push_back(entry.name);
    }
    json manifest;
    manifest["t0"] = t0;
    manifest["dt"] = dt;
    manifest["count"] = steps.size();
    manifest["vertex_count"] = mesh.vertex_count();
    manifest["fields"] = json::array();
    for (const auto& entry : layout) {
        manifest["fields"].push_back(
            {{"name", entry.name}, {"kind", entry.kind == FieldKind::Scalar ? "scalar" : "vector3"}});
    }
    for (std::size_t k = 0; k < steps.size(); ++k) {
        if (steps[k].layout.size() != layout.size()) {
            throw Error("snapshot step " + std::to_string(k) + " has a different field layout");
        }
        for (std::size_t f = 0; f < layout.size(); ++f) {
            if (steps[k].layout[f].name != layout[f].name ||
                steps[k].layout[f].kind != layout[f].kind) {
                throw Error("snapshot step " + std::to_string(k) + " has a different field layout");
            }
        }
        TriMesh with = unflatten_fields(mesh, steps[k]);
        save_fields_csv(with, names, dir / step_file_name(static_cast<int>(k)));
    }
    write_text_file(dir / "manifest.json", manifest.dump(2) + "\n");
}

SeriesOnDisk load_snapshot_series(const std::filesystem::path& dir) {
    const auto manifest_path = dir / "manifest.json";
    json manifest;
    try {
        manifest = json::parse(read_text_file(manifest_path));
    } catch (const json::parse_error& e) {
        throw ParseError(manifest_path.string() + ": " + e.what());
    }
    SeriesOnDisk out;
    out.series.t0 = manifest.at("t0").get<double>();
    out.series.dt = manifest.at("dt").get<double>();
    const int count = manifest.at("count").get<int>();
    out.vertex_count = manifest.at("vertex_count").get<int>();
    if (count < 1 || out.vertex_count < 1) {
        throw ParseError(manifest_path.string() + ": invalid count or vertex_count");
    }
    long state_len = 0;
    for (const auto& f : manifest.at("fields")) {
        LayoutEntry entry;
        entry.name = f.at("name").get<std::string>();
        entry.kind = kind_from_string(f.at("kind").get<std::string>(), manifest_path.string());
        state_len += static_cast<long>(entry.kind == FieldKind::Scalar ? 1 : 3) * out.vertex_count;
        out.layout.push_back(entry);
    }
    if (out.layout.empty()) {
        throw ParseError(manifest_path.string() + ": no fields declared");
    }
    out.series.states.resize(state_len, count);
    for (int k = 0; k < count; ++k) {
        const auto step_path = dir / step_file_name(k);
        auto fields = load_fields_csv(step_path, out.vertex_count);
        if (fields.size() != out.layout.size()) {
            throw ParseError(step_path.string() + ": expected " +
                             std::to_string(out.layout.size()) + " fields, found " +
                             std::to_string(fields.size()));
        }
        long offset = 0;
        for (std::size_t f = 0; f < out.layout.size(); ++f) {
            if (fields[f].name != out.layout[f].name || fields[f].kind != out.layout[f].kind) {
                throw ParseError(step_path.string() + ": field " + std::to_string(f) +
                                 " does not match the manifest layout");
            }
            out.series.states.col(k).segment(offset, fields[f].values.size()) = fields[f].values;
            offset += fields[f].values.size();
        }
    }
    return out;
}

}  // namespace romopt
