#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>

namespace romopt {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using Vec3 = Eigen::Vector3d;

/// Base class for all errors thrown by this library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed input file (STL, CSV, JSON, model container).
class ParseError : public Error {
public:
    using Error::Error;
};

/// Filesystem failure (unreadable/unwritable path).
class IoError : public Error {
public:
    using Error::Error;
};

/// Invalid or inconsistent study configuration. Maps to CLI exit code 2.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// Numerically singular linear system.
class SingularMatrixError : public Error {
public:
    using Error::Error;
};

/// Axis-aligned box, used for parameter bounds and coordinate normalization.
struct Box {
    Vector lo;
    Vector hi;

    int dim() const { return static_cast<int>(lo.size()); }

    /// Throws if lo/hi sizes differ or any component has lo >= hi.
    void validate() const;

    bool contains(const Vector& p, double tol = 0.0) const;

    double diameter() const { return (hi - lo).norm(); }

    Vector center() const { return 0.5 * (lo + hi); }
};

/// Rank-selection rule for truncated decompositions: either an explicit
/// rank or the smallest rank capturing a given fraction of squared
/// singular-value energy.
struct RankPolicy {
    enum class Kind { Fixed, Energy };

    Kind kind = Kind::Energy;
    int rank = 0;
    double energy_fraction = 1.0;

    static RankPolicy fixed(int r) {
        RankPolicy p;
        p.kind = Kind::Fixed;
        p.rank = r;
        return p;
    }

    static RankPolicy energy(double e) {
        RankPolicy p;
        p.kind = Kind::Energy;
        p.energy_fraction = e;
        return p;
    }
};

}  // namespace romopt
