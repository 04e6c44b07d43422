#pragma once

#include "vardom/instance.hpp"

#include <string>

namespace vardom {

// Text schema (version 1). Unknown fields are rejected; load(save(x)) is
// byte-identical (ordered keys, shortest round-trip doubles).

std::string instance_to_json(const Instance& inst, const Vec* candidate_x = nullptr,
                             const Vec* candidate_y = nullptr,
                             const std::string& provenance = "");
struct LoadedInstance {
  Instance inst;
  std::optional<Vec> candidate_x;
  std::optional<Vec> candidate_y;
  std::string provenance;
};

LoadedInstance instance_from_json(const std::string& text);
void save_instance(const std::string& path, const Instance& inst,
                   const Vec* candidate_x = nullptr, const Vec* candidate_y = nullptr,
                   const std::string& provenance = "");
LoadedInstance load_instance(const std::string& path);

enum class Profile { Grid1d, Grid2d, Polyhedral2d, Lifted };
Profile profile_from_name(const std::string& name);
std::string profile_name(Profile p);

struct GeneratorOptions {
  // delta/epsilon regime: "b_i" (eps > 1/16, delta < 1/4), "b_ii", or "" for
  // the profile default
  std::string regime;
};

struct GeneratedInstance {
  Instance inst;
  Vec candidate_x;
  Vec candidate_y;
  std::string provenance;
};

// Deterministic by seed. Profiles guarantee the standing hypotheses of their
// target harness: pointed cones, k inside every cone (so the scalarization
// condition holds), a certified candidate, and the requested regime.
GeneratedInstance generate(std::uint64_t seed, Profile profile, GeneratorOptions opt = {});

}  // namespace vardom
