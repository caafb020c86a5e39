#include "romopt/rom.hpp"

#include "romopt/io_util.hpp"
#include "romopt/linalg.hpp"

#include <json.hpp>

#include <cmath>
#include <cstring>
#include <string>

namespace romopt {

void ParametricSnapshotSet::validate() const {
    if (params.rows() < 1) {
        throw Error("snapshot set is empty");
    }
    if (params.rows() != states.cols()) {
        throw Error("snapshot set has " + std::to_string(params.rows()) +
                    " parameter rows but " + std::to_string(states.cols()) + " state columns");
    }
    if (params.cols() < 1 || states.rows() < 1) {
        throw Error("snapshot set has empty parameter or state vectors");
    }
    if (!params.allFinite() || !states.allFinite()) {
        throw Error("snapshot set contains non-finite values");
    }
    for (int a = 0; a < params.rows(); ++a) {
        for (int b = a + 1; b < params.rows(); ++b) {
            if ((params.row(a) - params.row(b)).norm() == 0.0) {
                throw Error("parameter rows " + std::to_string(a) + " and " +
                            std::to_string(b) + " coincide");
            }
        }
    }
}

RomModel build_rom(const ParametricSnapshotSet& set, const RomBuildOptions& options) {
    set.validate();
    const int ns = set.sample_count();
    if (ns < 2) {
        throw Error("build_rom needs at least 2 samples, got " + std::to_string(ns));
    }
    if (options.rank.kind == RankPolicy::Kind::Fixed && options.rank.rank > ns) {
        throw Error("requested rank " + std::to_string(options.rank.rank) + " exceeds the " +
                    std::to_string(ns) + " training samples");
    }

    RomModel model;
    model.layout = set.layout;
    model.centered = options.center;
    model.mean = options.center ? Vector(set.states.rowwise().mean())
                                : Vector(Vector::Zero(set.states.rows()));
    const Matrix centered = set.states.colwise() - model.mean;

    const TruncatedSvd svd = truncated_svd(centered, options.rank);
    model.basis = svd.u;
    model.singular_values = svd.sigma;

    // One coefficient row per sample; the interpolant maps parameters to
    // all r coefficients at once.
    const Matrix coeffs = centered.transpose() * model.basis;
    model.coeff_interpolant =
        rbf_fit(set.params, coeffs, options.kernel, options.lambda_reg, options.param_box);
    return model;
}

Vector rom_predict(const RomModel& model, const Vector& mu) {
    return model.mean + model.basis * rbf_eval(model.coeff_interpolant, mu);
}

bool rom_is_extrapolating(const RomModel& model, const Vector& mu) {
    return rbf_is_extrapolating(model.coeff_interpolant, mu);
}

Vector pod_energy(const RomModel& model) {
    const Vector squares = model.singular_values.array().square();
    const double total = squares.sum();
    Vector out(squares.size());
    if (total == 0.0) {
        out.setOnes();
        return out;
    }
    double acc = 0.0;
    for (int i = 0; i < squares.size(); ++i) {
        acc += squares[i];
        out[i] = acc / total;
    }
    out[squares.size() - 1] = 1.0;
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

const char* family_name(RbfKernel::Family family) {
    switch (family) {
        case RbfKernel::Family::Multiquadric: return "multiquadric";
        case RbfKernel::Family::Gaussian: return "gaussian";
        case RbfKernel::Family::ThinPlate: return "thin_plate";
    }
    return "multiquadric";
}

RbfKernel::Family family_from_string(const std::string& s, const std::string& origin) {
    if (s == "multiquadric") return RbfKernel::Family::Multiquadric;
    if (s == "gaussian") return RbfKernel::Family::Gaussian;
    if (s == "thin_plate") return RbfKernel::Family::ThinPlate;
    throw ParseError(origin + ": unknown kernel family '" + s + "'");
}

}  // namespace

void save_rom_model(const RomModel& model, const std::filesystem::path& path,
                    const RomProvenance& provenance) {
    const int n = model.dim();
    const int r = model.rank();
    const int ns = model.coeff_interpolant.center_count();
    const int m = model.coeff_interpolant.input_dim();

    json header;
    header["kind"] = "rom";
    header["rows"] = n;
    header["rank"] = r;
    header["samples"] = ns;
    header["param_dim"] = m;
    header["centered"] = model.centered;
    header["layout"] = json::array();
    for (const auto& entry : model.layout) {
        header["layout"].push_back(
            {{"name", entry.name}, {"kind", entry.kind == FieldKind::Scalar ? "scalar" : "vector3"}});
    }
    header["kernel"] = {{"family", family_name(model.coeff_interpolant.kernel.family)},
                        {"epsilon", model.coeff_interpolant.kernel.epsilon}};
    header["lambda_reg"] = model.coeff_interpolant.lambda_reg;
    if (model.coeff_interpolant.normalization) {
        const Box& box = *model.coeff_interpolant.normalization;
        json lo = json::array(), hi = json::array();
        for (int i = 0; i < box.dim(); ++i) {
            lo.push_back(box.lo[i]);
            hi.push_back(box.hi[i]);
        }
        header["param_box"] = {{"lo", lo}, {"hi", hi}};
    } else {
        header["param_box"] = nullptr;
    }
    header["provenance"] = {{"config_hash", provenance.config_hash},
                            {"sample_hashes", provenance.sample_hashes}};
    header["blobs"] = {"mean", "basis", "singular_values", "centers", "weights"};
    const std::string head = header.dump();

    std::string out;
    out.append(kMagic, 8);
    append_u64_le(out, head.size());
    out += head;
    append_blob(out, model.mean.data(), n);
    append_blob(out, model.basis.data(), static_cast<long>(n) * r);
    append_blob(out, model.singular_values.data(), r);
    append_blob(out, model.coeff_interpolant.centers.data(), static_cast<long>(ns) * m);
    append_blob(out, model.coeff_interpolant.weights.data(), static_cast<long>(ns) * r);
    write_binary_file(path, out.data(), out.size());
}

LoadedRom load_rom_model(const std::filesystem::path& path) {
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
    if (header.value("kind", "") != "rom") {
        throw ParseError(origin + ": not a rom model (kind = '" + header.value("kind", "") + "')");
    }

    LoadedRom out;
    RomModel& model = out.model;
    const int n = header.at("rows").get<int>();
    const int r = header.at("rank").get<int>();
    const int ns = header.at("samples").get<int>();
    const int m = header.at("param_dim").get<int>();
    if (n < 1 || r < 1 || ns < 2 || m < 1) {
        throw ParseError(origin + ": invalid dimensions");
    }
    model.centered = header.at("centered").get<bool>();
    for (const auto& entry : header.at("layout")) {
        const std::string kind = entry.at("kind").get<std::string>();
        if (kind != "scalar" && kind != "vector3") {
            throw ParseError(origin + ": unknown field kind '" + kind + "'");
        }
        model.layout.push_back({entry.at("name").get<std::string>(),
                                kind == "scalar" ? FieldKind::Scalar : FieldKind::Vector3});
    }
    RbfInterpolant& interp = model.coeff_interpolant;
    interp.kernel.family =
        family_from_string(header.at("kernel").at("family").get<std::string>(), origin);
    interp.kernel.epsilon = header.at("kernel").at("epsilon").get<double>();
    interp.lambda_reg = header.at("lambda_reg").get<double>();
    if (!header.at("param_box").is_null()) {
        Box box;
        const auto& jbox = header.at("param_box");
        const auto& lo = jbox.at("lo");
        const auto& hi = jbox.at("hi");
        if (static_cast<int>(lo.size()) != m || static_cast<int>(hi.size()) != m) {
            throw ParseError(origin + ": param_box dimension does not match param_dim");
        }
        box.lo.resize(m);
        box.hi.resize(m);
        for (int i = 0; i < m; ++i) {
            box.lo[i] = lo[i].get<double>();
            box.hi[i] = hi[i].get<double>();
        }
        interp.normalization = box;
    }
    const auto& prov = header.at("provenance");
    out.provenance.config_hash = prov.at("config_hash").get<std::string>();
    for (const auto& h : prov.at("sample_hashes")) {
        out.provenance.sample_hashes.push_back(h.get<std::string>());
    }

    const std::size_t payload = bytes.size() - 16 - head_len;
    const std::size_t expected =
        sizeof(double) * (static_cast<std::size_t>(n) + static_cast<std::size_t>(n) * r + r +
                          static_cast<std::size_t>(ns) * m + static_cast<std::size_t>(ns) * r);
    if (payload != expected) {
        throw ParseError(origin + ": payload is " + std::to_string(payload) + " bytes, expected " +
                         std::to_string(expected));
    }
    const std::uint8_t* p = bytes.data() + 16 + head_len;
    auto read_into = [&p](double* data, long count) {
        for (long i = 0; i < count; ++i, p += 8) {
            data[i] = read_f64_le(p);
        }
    };
    model.mean.resize(n);
    read_into(model.mean.data(), n);
    model.basis.resize(n, r);
    read_into(model.basis.data(), static_cast<long>(n) * r);
    model.singular_values.resize(r);
    read_into(model.singular_values.data(), r);
    interp.centers.resize(ns, m);
    read_into(interp.centers.data(), static_cast<long>(ns) * m);
    interp.weights.resize(ns, r);
    read_into(interp.weights.data(), static_cast<long>(ns) * r);

    const Matrix gram = model.basis.transpose() * model.basis;
    if ((gram - Matrix::Identity(r, r)).cwiseAbs().maxCoeff() > 1e-8) {
        throw ParseError(origin + ": basis columns are not orthonormal");
    }
    return out;
}

}  // namespace romopt
