#include "doctest.h"

#include "vardom/instances_io.hpp"
#include "vardom/scalarize.hpp"
#include "vardom/solutions.hpp"

#include <json.hpp>

using namespace vardom;

TEST_CASE("round trip is byte exact") {
  auto gen = generate(42, Profile::Grid1d);
  std::string text = instance_to_json(gen.inst, &gen.candidate_x, &gen.candidate_y,
                                      gen.provenance);
  auto loaded = instance_from_json(text);
  std::string text2 = instance_to_json(loaded.inst, &*loaded.candidate_x, &*loaded.candidate_y,
                                       loaded.provenance);
  CHECK(text == text2);
}

TEST_CASE("same seed twice gives identical bytes") {
  for (Profile p : {Profile::Grid1d, Profile::Grid2d, Profile::Polyhedral2d, Profile::Lifted}) {
    auto a = generate(7, p);
    auto b = generate(7, p);
    CHECK(instance_to_json(a.inst, &a.candidate_x, &a.candidate_y, a.provenance) ==
          instance_to_json(b.inst, &b.candidate_x, &b.candidate_y, b.provenance));
    auto c = generate(8, p);
    CHECK(instance_to_json(a.inst, &a.candidate_x, &a.candidate_y, a.provenance) !=
          instance_to_json(c.inst, &c.candidate_x, &c.candidate_y, c.provenance));
  }
}

TEST_CASE("schema violations are rejected") {
  auto gen = generate(3, Profile::Grid1d);
  std::string text = instance_to_json(gen.inst);

  // unknown field
  std::string bad1 = text;
  bad1.replace(bad1.find("\"schema_version\""), 16, "\"schema_versionX\"");
  CHECK_THROWS_AS((void)instance_from_json(bad1), SchemaError);

  // missing cone field
  auto j = nlohmann::json::parse(text);
  j["vds"]["cells"] = nlohmann::json::array();
  j["vds"].erase("default_cone");
  CHECK_THROWS_AS((void)instance_from_json(j.dump()), SchemaError);

  // k dimension mismatch against Y
  auto j2 = nlohmann::json::parse(text);
  j2["k"] = {1.0, 0.0, 0.0, 0.0};
  CHECK_THROWS_AS((void)instance_from_json(j2.dump()), Error);
}

TEST_CASE("generator post-conditions revalidate via the certifiers") {
  for (std::uint64_t seed : {1ULL, 2ULL, 3ULL, 4ULL, 5ULL}) {
    auto gen = generate(seed, Profile::Grid1d);
    auto cert = certify_nondominated_K(gen.inst, gen.candidate_x, gen.candidate_y);
    CHECK(cert.verdict == Verdict::Certified);
    auto sc = scalarization_condition(gen.inst.cone_field, gen.candidate_x, gen.inst.epsilon,
                                      gen.inst.k, gen.inst.norm);
    CHECK(sc.holds);

    auto g2 = generate(seed, Profile::Grid2d);
    auto cert2 = certify_nondominated_K(g2.inst, g2.candidate_x, g2.candidate_y);
    CHECK(cert2.verdict == Verdict::Certified);

    auto gl = generate(seed, Profile::Lifted);
    auto certq = certify_nondominated_Q(gl.inst, gl.candidate_x, gl.candidate_y);
    CHECK(certq.verdict == Verdict::Certified);
  }
}

TEST_CASE("regime selection is honored") {
  auto bi = generate(11, Profile::Polyhedral2d, {.regime = "b_i"});
  CHECK(bi.inst.epsilon > 1.0 / 16.0);
  CHECK(bi.inst.delta < 0.25);
  auto bii = generate(11, Profile::Grid2d, {.regime = "b_ii"});
  CHECK(bii.inst.delta < bii.inst.epsilon);
  CHECK(std::sqrt(bii.inst.delta) - bii.inst.delta < bii.inst.epsilon);
}

TEST_CASE("file save and load") {
  auto gen = generate(100, Profile::Polyhedral2d);
  std::string path = "/tmp/vardom_test_instance.json";
  save_instance(path, gen.inst, &gen.candidate_x, &gen.candidate_y, gen.provenance);
  auto loaded = load_instance(path);
  CHECK(loaded.inst.dim_x == gen.inst.dim_x);
  CHECK(loaded.provenance == gen.provenance);
  REQUIRE(loaded.candidate_x.has_value());
  CHECK((*loaded.candidate_x - gen.candidate_x).cwiseAbs().maxCoeff() == 0.0);
  CHECK_THROWS_AS((void)load_instance("/tmp/definitely_missing_vardom.json"), Error);
}

TEST_CASE("grid1d keeps sqrt(delta) below epsilon") {
  for (std::uint64_t seed = 20; seed < 40; ++seed) {
    auto gen = generate(seed, Profile::Grid1d);
    CHECK(std::sqrt(gen.inst.delta) < gen.inst.epsilon);
  }
}
