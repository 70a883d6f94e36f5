#include "lppd/env.hpp"

namespace lppd {

std::string to_string(EnvironmentKind kind) {
    return kind == EnvironmentKind::interior ? "interior" : "boundary";
}

EnvironmentKind environment_kind_from_string(const std::string& s) {
    if (s == "interior") return EnvironmentKind::interior;
    if (s == "boundary") return EnvironmentKind::boundary;
    throw DomainError("unknown environment kind '" + s + "'");
}

nlohmann::json to_json(const Region& region) {
    return {{"x_min", region.x_min}, {"y_min", region.y_min},
            {"x_max", region.x_max}, {"y_max", region.y_max}};
}

Region region_from_json(const nlohmann::json& j) {
    Region r{j.at("x_min").get<Coord>(), j.at("y_min").get<Coord>(), j.at("x_max").get<Coord>(),
             j.at("y_max").get<Coord>()};
    r.validate();
    return r;
}

nlohmann::json to_json(const EnvironmentManifest& manifest) {
    return {{"master_seed", manifest.master_seed},
            {"kind", to_string(manifest.kind)},
            {"region", to_json(manifest.region)},
            {"generator_version", manifest.generator_version}};
}

EnvironmentManifest manifest_from_json(const nlohmann::json& j) {
    EnvironmentManifest m;
    m.master_seed = j.at("master_seed").get<std::uint64_t>();
    m.kind = environment_kind_from_string(j.at("kind").get<std::string>());
    m.region = region_from_json(j.at("region"));
    m.generator_version = j.at("generator_version").get<int>();
    return m;
}

Environment regenerate(const EnvironmentManifest& manifest) {
    if (manifest.generator_version != generator_version)
        throw DomainError("manifest generator_version " + std::to_string(manifest.generator_version) +
                          " does not match this build (" + std::to_string(generator_version) + ")");
    if (manifest.kind == EnvironmentKind::boundary) return gen_boundary(manifest.region, manifest.master_seed);
    return gen_interior(manifest.region, manifest.master_seed);
}

} // namespace lppd
