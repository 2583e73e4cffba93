#include "doctest.h"
#include "fpdyn/errors.hpp"
#include "fpdyn/orbits.hpp"
#include "fpdyn/return_map.hpp"

using namespace fpdyn;

TEST_SUITE("return_map") {

TEST_CASE("identity and composition") {
  const ProjectiveMap id = ProjectiveMap::identity(3);
  CHECK(id.homogeneous() == Matrix::identity(4));
  CHECK(id.apply({0.1, 0.2, 0.3}) == Vec{0.1, 0.2, 0.3});
  const ProjectiveMap t(Matrix{{2, 0, 1, 0.5}, {0, 1, 0, 0.1}, {1, 0, 3, 0}, {0.1, 0.2, 0, 1}});
  CHECK((compose(t, id).homogeneous() - t.homogeneous()).max_abs() < 1e-15);
  CHECK((compose(id, t).homogeneous() - t.homogeneous()).max_abs() < 1e-15);
  const Vec z{0.3, -0.2, 0.4};
  const ProjectiveMap tt = compose(t, t);
  CHECK(max_abs_diff(tt.apply(z), t.apply(t.apply(z))) < 1e-12);
  CHECK_THROWS_AS(ProjectiveMap(Matrix{{1, 0}, {1, 0}}).apply({-0.0}), DomainError);
  CHECK_THROWS_AS(id.apply({1.0}), StructuralError);
}

TEST_CASE("normalization of the homogeneous matrix") {
  const ProjectiveMap t(Matrix{{4, 0}, {0, 2}});
  CHECK(t.homogeneous()(1, 1) == 1.0);
  CHECK(t.apply({1.0})[0] == doctest::Approx(2.0));
}

TEST_CASE("sections of the cycle") {
  CHECK(to_string(cycle_section(0)) == "S1");
  CHECK_THROWS_AS(cycle_section(6), ParameterError);
  for (int k = 0; k < 6; ++k) {
    const SectionId s = cycle_section(k);
    const RegionLabel to = shapley_cycle()[static_cast<std::size_t>((k + 1) % 6)];
    CHECK((s.switching == Player::A ? RegionLabel{s.to, s.stay} : RegionLabel{s.stay, s.to}) == to);
  }
}

TEST_CASE("fitted pieces and the direct first return") {
  Rng rng(51);
  const double beta = -0.5;
  const BimatrixGame g = make_shapley(beta);
  const ProjectiveFit fit = projective_from_samples(g, cycle_section(0), cycle_section(1), rng);
  CHECK(fit.residual < 1e-8);
  const FirstReturn fr = first_return(beta, rng);
  CHECK(fr.pieces.size() == 6);
  CHECK(fr.residual < 1e-8);
  SimConfig cfg;
  cfg.max_events = 6;
  int compared = 0;
  for (int k = 0; k < 20; ++k) {
    const StateV v = sample_section(g, cycle_section(0), rng);
    const Trajectory tr = simulate_from(g, v, cfg);
    if (tr.segments.size() != 6) continue;
    ++compared;
    CHECK(max_abs_diff(fr.map.apply(section_coords(cycle_section(0), v)),
                       section_coords(cycle_section(0), tr.segments.back().end)) < 1e-8);
  }
  CHECK(compared > 10);
}

TEST_CASE("fixed point of the first return is the clockwise orbit") {
  for (double beta : {-0.5, 0.0}) {
    Rng rng(52);
    const FirstReturn fr = first_return(beta, rng);
    const PeriodicOrbitSpec o = clockwise_orbit(beta);
    CHECK(max_abs_diff(fr.fixed_point, section_coords(cycle_section(0), o.full_path.front().end)) < 1e-8);
    CHECK(max_abs_diff(fr.map.apply(fr.e_coords), fr.e_coords) < 1e-8);
  }
}

TEST_CASE("iterates converge to the fixed point") {
  Rng rng(53);
  const FirstReturn fr = first_return(-0.5, rng);
  const BimatrixGame g = make_shapley(-0.5);
  for (int k = 0; k < 30; ++k) {
    Vec z = section_coords(cycle_section(0), sample_section(g, cycle_section(0), rng));
    for (int it = 0; it < 200; ++it) z = fr.map.apply(z);
    CHECK(max_abs_diff(z, fr.fixed_point) < 1e-6);
  }
}

TEST_CASE("attraction report") {
  const AttractionReport r = attraction_check(-0.9, 100, 300, 5);
  CHECK(r.n_starts == 100);
  CHECK(r.converged_fraction == 1.0);
  CHECK(r.outliers.empty());
  CHECK(r.worst_distance < 1e-5);
  CHECK_THROWS_AS(attraction_check(0.3, 10, 100, 1), ParameterError);
}

}
