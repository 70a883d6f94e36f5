#pragma once

#include "lppd/rng.hpp"
#include "lppd/types.hpp"

#include <Eigen/Core>
#include <json.hpp>

#include <cstdint>
#include <new>
#include <string>

namespace lppd {

enum class EnvironmentKind { interior, boundary };

std::string to_string(EnvironmentKind kind);
EnvironmentKind environment_kind_from_string(const std::string& s);

/// Bumped whenever the site -> weight map changes.
inline constexpr int generator_version = 1;

/// Largest field that gen_interior/gen_boundary will materialize.
inline constexpr std::uint64_t max_materialized_sites = std::uint64_t{1} << 31;

/// The unbounded i.i.d. weight field behind every environment. Each site's
/// weight is a hash of (master_seed, kind, x, y) pushed through the inverse
/// exponential CDF, so any window can be regenerated independently and in
/// any order.
///
/// Interior kind: Exp(1) everywhere. Boundary kind: 0 at the origin, Exp(1/2)
/// on {(k,0), (0,k) : k >= 1}, Exp(1) elsewhere (only the closed first
/// quadrant is meaningful).
class WeightLattice {
public:
    WeightLattice(std::uint64_t master_seed, EnvironmentKind kind) noexcept
        : master_seed_(master_seed),
          kind_(kind),
          key_(detail::mix64(detail::mix64(master_seed) ^
                             (kind == EnvironmentKind::interior ? 0x1D8E4E27C47D124FULL
                                                                : 0x5851F42D4C957F2DULL))) {}

    std::uint64_t master_seed() const noexcept { return master_seed_; }
    EnvironmentKind kind() const noexcept { return kind_; }

    double weight(Coord x, Coord y) const noexcept {
        const std::uint64_t site = (static_cast<std::uint64_t>(static_cast<std::uint32_t>(x)) << 32) |
                                   static_cast<std::uint32_t>(y);
        const double w = detail::neg_log_open_unit(
            detail::open_unit(detail::mix64(key_ + site * detail::golden_gamma)));
        // Branch-free so that sweeps over this lattice vectorize.
        const bool b = kind_ == EnvironmentKind::boundary;
        const bool origin = b & (x == 0) & (y == 0);
        const bool axis = b & (((x == 0) & (y > 0)) | ((y == 0) & (x > 0)));
        // Factor is exactly 0, 1 or 2, so the product is exact.
        const int factor = (1 + static_cast<int>(axis)) * static_cast<int>(!origin);
        return w * static_cast<double>(factor);
    }
    double weight(const Point& p) const noexcept { return weight(p.x, p.y); }

private:
    std::uint64_t master_seed_;
    EnvironmentKind kind_;
    std::uint64_t key_;
};

/// A materialized, immutable window of a WeightLattice. weights()(i, j) is the
/// weight of site (x_min + i, y_min + j).
template <typename Scalar>
class BasicEnvironment {
public:
    using Field = Eigen::Array<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

    BasicEnvironment(const Region& region, std::uint64_t master_seed, EnvironmentKind kind)
        : region_(region), master_seed_(master_seed), kind_(kind) {
        region.validate();
        if (region.area() > max_materialized_sites)
            throw ResourceError("environment region of " + std::to_string(region.area()) +
                                " sites exceeds the materialization limit");
        const WeightLattice lattice(master_seed, kind);
        try {
            weights_.resize(region.width(), region.height());
        } catch (const std::bad_alloc&) {
            throw ResourceError("out of memory allocating environment");
        }
        for (Eigen::Index j = 0; j < weights_.cols(); ++j) {
            Scalar* col = weights_.col(j).data();
            const Coord y = region.y_min + j;
            const Eigen::Index w = weights_.rows();
            for (Eigen::Index i = 0; i < w; ++i)
                col[i] = static_cast<Scalar>(lattice.weight(region.x_min + i, y));
        }
    }

    const Region& region() const noexcept { return region_; }
    std::uint64_t master_seed() const noexcept { return master_seed_; }
    EnvironmentKind kind() const noexcept { return kind_; }
    const Field& weights() const noexcept { return weights_; }
    WeightLattice lattice() const noexcept { return WeightLattice(master_seed_, kind_); }

    /// Unchecked access; callers validate boxes against region() first.
    Scalar weight(Coord x, Coord y) const noexcept {
        return weights_(static_cast<Eigen::Index>(x - region_.x_min),
                        static_cast<Eigen::Index>(y - region_.y_min));
    }
    Scalar weight(const Point& p) const noexcept { return weight(p.x, p.y); }

    Scalar at(const Point& p) const {
        if (!region_.contains(p)) throw DomainError("site " + to_string(p) + " outside environment");
        return weight(p);
    }

private:
    Region region_;
    std::uint64_t master_seed_;
    EnvironmentKind kind_;
    Field weights_;
};

using Environment = BasicEnvironment<double>;

/// Exp(1) weights on every site of `region`.
template <typename Scalar = double>
BasicEnvironment<Scalar> gen_interior(const Region& region, std::uint64_t master_seed) {
    return BasicEnvironment<Scalar>(region, master_seed, EnvironmentKind::interior);
}

/// Stationary boundary environment on a region anchored at the origin.
template <typename Scalar = double>
BasicEnvironment<Scalar> gen_boundary(const Region& region, std::uint64_t master_seed) {
    if (region.x_min != 0 || region.y_min != 0)
        throw DomainError("boundary environment must be anchored at the origin");
    return BasicEnvironment<Scalar>(region, master_seed, EnvironmentKind::boundary);
}

/// Everything needed to regenerate an environment bit-for-bit.
struct EnvironmentManifest {
    std::uint64_t master_seed = 0;
    EnvironmentKind kind = EnvironmentKind::interior;
    Region region;
    int generator_version = lppd::generator_version;
};

nlohmann::json to_json(const Region& region);
Region region_from_json(const nlohmann::json& j);

template <typename Scalar>
EnvironmentManifest manifest_of(const BasicEnvironment<Scalar>& env) {
    return {env.master_seed(), env.kind(), env.region(), generator_version};
}

nlohmann::json to_json(const EnvironmentManifest& manifest);
EnvironmentManifest manifest_from_json(const nlohmann::json& j);

/// Rebuilds the environment a manifest describes. Throws DomainError on a
/// generator version mismatch.
Environment regenerate(const EnvironmentManifest& manifest);

} // namespace lppd
