#include <doctest.h>

#include <cmath>
#include <sstream>
#include <vector>

#include <json.hpp>

#include "kaonlab/decoherence.hpp"
#include "kaonlab/errors.hpp"
#include "kaonlab/evolution.hpp"

using namespace kaonlab;

TEST_CASE("zeta = 0 reproduces quantum mechanics in both bases") {
  const auto c = default_constants();
  for (double tl : {0.0, 0.7, 2.5}) {
    for (double tr : {0.0, 1.3}) {
      for (auto b : {Basis::mass, Basis::strangeness}) {
        CHECK(modified_like_probability(b, tl, tr, 0.0, c) ==
              doctest::Approx(joint_like_probability(tl, tr, c)).epsilon(1e-12));
        CHECK(modified_unlike_probability(b, tl, tr, 0.0, c) ==
              doctest::Approx(joint_unlike_probability(tl, tr, c)).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("mass basis asymmetry scales with 1 - zeta") {
  const auto c = default_constants();
  for (double z : {0.0, 0.13, 0.5, 1.0}) {
    for (double dt : {0.0, 1.0, 4.0}) {
      CHECK(modified_asymmetry(Basis::mass, 1.0 + dt, 1.0, z, c) ==
            doctest::Approx(asymmetry_qm(dt, c) * (1 - z)));
      const double like = modified_like_probability(Basis::mass, 1.0 + dt, 1.0, z, c);
      const double unlike = modified_unlike_probability(Basis::mass, 1.0 + dt, 1.0, z, c);
      CHECK((unlike - like) / (unlike + like) ==
            doctest::Approx(modified_asymmetry(Basis::mass, 1.0 + dt, 1.0, z, c)));
    }
  }
}

TEST_CASE("strangeness basis closed form matches its probabilities") {
  const auto c = default_constants();
  for (double z : {0.0, 0.3, 1.0}) {
    for (double tl : {0.2, 1.0, 3.0}) {
      const double tr = 0.5;
      const double like = modified_like_probability(Basis::strangeness, tl, tr, z, c);
      const double unlike = modified_unlike_probability(Basis::strangeness, tl, tr, z, c);
      CHECK((unlike - like) / (unlike + like) ==
            doctest::Approx(modified_asymmetry(Basis::strangeness, tl, tr, z, c)).epsilon(1e-10));
    }
  }
}

TEST_CASE("factorization depends on the basis") {
  const auto c = default_constants();
  const double mass = modified_like_probability(Basis::mass, 1.0, 1.0, 1.0, c);
  const double strange = modified_like_probability(Basis::strangeness, 1.0, 1.0, 1.0, c);
  CHECK(std::abs(mass - strange) > 1e-3);
  // Furry in the strangeness basis still forbids like pairs at t = 0 ...
  CHECK(modified_like_probability(Basis::strangeness, 0.0, 0.0, 1.0, c) == doctest::Approx(0.0));
  // ... while mass-basis factorization does not.
  CHECK(modified_like_probability(Basis::mass, 0.0, 0.0, 1.0, c) > 0.1);
}

TEST_CASE("strangeness asymmetry is nonlinear in zeta") {
  const auto c = default_constants();
  const double h = 0.05;
  const auto a = [&](Basis b, double z) { return modified_asymmetry(b, 2.0, 0.5, z, c); };
  const double curvature_s = a(Basis::strangeness, 0.5 + h) - 2 * a(Basis::strangeness, 0.5) +
                             a(Basis::strangeness, 0.5 - h);
  const double curvature_m = a(Basis::mass, 0.5 + h) - 2 * a(Basis::mass, 0.5) + a(Basis::mass, 0.5 - h);
  CHECK(std::abs(curvature_s) > 1e-6);
  CHECK(std::abs(curvature_m) < 1e-14);
}

TEST_CASE("zeta range checks") {
  const auto c = default_constants();
  CHECK_THROWS_AS(modified_like_probability(Basis::mass, 1.0, 1.0, 1.5, c), MathError);
  CHECK_NOTHROW(modified_like_probability(Basis::mass, 1.0, 1.0, 1.5, c, ZetaRange::extended));
  CHECK_THROWS_AS(modified_like_probability(Basis::mass, -1.0, 1.0, 0.5, c), MathError);
}

namespace {

std::vector<AsymmetryPoint> cplear() {
  return {{"C(0)", 1.0, 1.0, 0.81, 0.17, 0.93}, {"C(5)", 1.0, 3.5, 0.48, 0.12, 0.56}};
}

}  // namespace

TEST_CASE("mass basis fit agrees with weighted least squares") {
  const auto c = default_constants();
  const auto r = fit_zeta(cplear(), Basis::mass, FitMode::corrected_theory_scaling, c);
  REQUIRE(r.closed_form_zeta.has_value());
  CHECK(r.zeta_hat == doctest::Approx(*r.closed_form_zeta).epsilon(1e-7));
  CHECK(r.zeta_hat == doctest::Approx(0.1349).epsilon(1e-3));
  // Linear model: the delta chi2 = 1 interval is symmetric.
  CHECK(r.sigma_minus == doctest::Approx(r.sigma_plus).epsilon(1e-6));
  CHECK(r.ndf == 1);
  CHECK(chi_square(cplear(), Basis::mass, FitMode::corrected_theory_scaling,
                   r.zeta_hat + r.sigma_plus, c) ==
        doctest::Approx(r.chi2_min + 1.0).epsilon(1e-6));
}

TEST_CASE("fit recovers a synthetic zeta") {
  const auto c = default_constants();
  std::vector<AsymmetryPoint> pts;
  for (double dt : {0.0, 0.5, 1.0, 2.0, 3.0}) {
    AsymmetryPoint p{"p", 1.0 + dt, 1.0, 0.0, 0.05, std::nullopt};
    p.measured = modified_asymmetry(Basis::strangeness, p.t_l, p.t_r, 0.4, c);
    pts.push_back(p);
  }
  const auto r = fit_zeta(pts, Basis::strangeness, FitMode::raw_model, c);
  CHECK(r.zeta_hat == doctest::Approx(0.4).epsilon(1e-5));
  CHECK(r.chi2_min < 1e-9);
}

TEST_CASE("fit input validation") {
  const auto c = default_constants();
  const auto expect_kind = [&](std::vector<AsymmetryPoint> pts, FitMode mode, DataError::Kind k) {
    try {
      fit_zeta(pts, Basis::mass, mode, c);
      FAIL("expected DataError");
    } catch (const DataError& e) {
      CHECK(e.kind() == k);
    }
  };
  expect_kind({}, FitMode::raw_model, DataError::Kind::no_data);
  auto bad = cplear();
  bad[0].sigma = 0.0;
  expect_kind(bad, FitMode::raw_model, DataError::Kind::bad_sigma);
  auto missing = cplear();
  missing[1].corrected_theory.reset();
  expect_kind(missing, FitMode::corrected_theory_scaling, DataError::Kind::missing_theory);
}

TEST_CASE("asymmetry csv reader") {
  std::istringstream good(
      "# comment\nlabel,t_l,t_r,measured,sigma,corrected_theory\n"
      "a,1,1,0.8,0.1,0.9\nb,1,2,0.5,0.1,\n");
  const auto pts = read_asymmetry_csv(good);
  REQUIRE(pts.size() == 2);
  CHECK(pts[0].corrected_theory == 0.9);
  CHECK_FALSE(pts[1].corrected_theory.has_value());

  const auto kind_of = [](const std::string& text) {
    std::istringstream in(text);
    try {
      read_asymmetry_csv(in);
    } catch (const DataError& e) {
      return e.kind();
    }
    FAIL("expected DataError");
    return DataError::Kind::io;
  };
  CHECK(kind_of("") == DataError::Kind::no_data);
  CHECK(kind_of("label,t_l,t_r,measured,sigma,corrected_theory\n") == DataError::Kind::no_data);
  CHECK(kind_of("label,a,b\n") == DataError::Kind::parse);
  CHECK(kind_of("label,t_l,t_r,measured,sigma,corrected_theory\na,1,x,0.8,0.1,0.9\n") ==
        DataError::Kind::parse);
  CHECK_THROWS_AS(read_asymmetry_csv(std::filesystem::path("/nonexistent.csv")), DataError);
}

TEST_CASE("fit result json") {
  const auto r = fit_zeta(cplear(), Basis::mass, FitMode::corrected_theory_scaling,
                          default_constants());
  const auto j = nlohmann::json::parse(fit_result_json(r));
  CHECK(j.at("basis") == "MASS");
  CHECK(j.at("zeta_hat").get<double>() == doctest::Approx(r.zeta_hat));
}
