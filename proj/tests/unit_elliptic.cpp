#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "roughbv/elliptic.hpp"
#include "roughbv/rng.hpp"

using namespace roughbv;

namespace {

GridDomain disk(double h) {
  DomainParams prm;
  prm.h = h;
  prm.radius = 1.0;
  return build_domain("disk", prm);
}

double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double m = 0.0;
  for (size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

}  // namespace

TEST_CASE("constants are discrete solutions") {
  auto dom = disk(1.0 / 32.0);
  auto coeff = CoefficientField::identity(dom);
  std::vector<double> f(dom.bsample.size(), 1.0);
  auto u = solve_dirichlet(dom, coeff, f);
  for (double v : u.v) CHECK(std::abs(v - 1.0) <= 1e-9);
}

TEST_CASE("linear boundary data reproduces the coordinate") {
  auto dom = disk(1.0 / 32.0);
  auto coeff = CoefficientField::identity(dom);
  auto f = boundary_from_function(dom, [](Pt p) { return p[0]; });
  auto u = solve_dirichlet(dom, coeff, f);
  auto exact = field_from_function(dom, [](Pt p) { return p[0]; });
  CHECK(max_abs_diff(u.v, exact.v) <= 2.0 * dom.h);
}

TEST_CASE("harmonic polynomial x^2-y^2: first-order boundary band error") {
  auto dom = disk(1.0 / 32.0);
  auto coeff = CoefficientField::identity(dom);
  auto f = boundary_from_function(dom, [](Pt p) { return p[0] * p[0] - p[1] * p[1]; });
  auto u = solve_dirichlet(dom, coeff, f);
  auto exact = field_from_function(dom, [](Pt p) { return p[0] * p[0] - p[1] * p[1]; });
  CHECK(max_abs_diff(u.v, exact.v) <= 5.0 * dom.h);
}

TEST_CASE("discrete maximum principle and linearity") {
  auto dom = disk(1.0 / 24.0);
  auto coeff = CoefficientField::from_function(dom, [](Pt p) {
    double a = 1.0 + 0.5 * std::sin(3.0 * p[0]);
    double b = 1.0 + 0.3 * std::cos(2.0 * p[1]);
    return std::array<double, 4>{a, 0.0, 0.0, b};
  });
  Rng rng(5);
  std::vector<double> f(dom.bsample.size()), g(dom.bsample.size());
  for (size_t s = 0; s < f.size(); ++s) {
    f[s] = rng.uniform(-1.0, 2.0);
    g[s] = rng.uniform(-1.0, 1.0);
  }
  auto uf = solve_dirichlet(dom, coeff, f);
  double fmin = *std::min_element(f.begin(), f.end());
  double fmax = *std::max_element(f.begin(), f.end());
  for (double v : uf.v) {
    CHECK(v >= fmin - 1e-9);
    CHECK(v <= fmax + 1e-9);
  }
  auto ug = solve_dirichlet(dom, coeff, g);
  std::vector<double> combo(f.size());
  for (size_t s = 0; s < f.size(); ++s) combo[s] = 2.0 * f[s] - 3.0 * g[s];
  auto uc = solve_dirichlet(dom, coeff, combo);
  double lin_err = 0.0;
  for (int c = 0; c < dom.ncells(); ++c)
    lin_err = std::max(lin_err, std::abs(uc.v[c] - 2.0 * uf.v[c] + 3.0 * ug.v[c]));
  CHECK(lin_err <= 1e-9 * 10.0);
}

TEST_CASE("nonsymmetric coefficients run through the nonsymmetric path") {
  auto dom = disk(1.0 / 24.0);
  auto coeff = CoefficientField::from_function(dom, [](Pt) {
    return std::array<double, 4>{1.0, 0.25, -0.25, 1.0};
  });
  CHECK(!coeff.symmetric_diagonal());
  std::vector<double> f(dom.bsample.size(), 1.0);
  for (size_t s = 0; s < f.size(); ++s) f[s] = dom.bsample[s][0];
  auto u = solve_dirichlet(dom, coeff, f);
  // skew part of a constant matrix is divergence free: u still solves the
  // Laplace equation, so the coordinate is reproduced up to band error
  auto exact = field_from_function(dom, [](Pt p) { return p[0]; });
  CHECK(max_abs_diff(u.v, exact.v) <= 3.0 * dom.h);
}

TEST_CASE("poisson: zero data, radial oracle, face-gradient identity") {
  auto dom = disk(1.0 / 32.0);
  auto coeff = CoefficientField::identity(dom);
  DiscreteField H0;
  H0.v.assign(dom.ncells(), 0.0);
  VectorField Xi0;
  Xi0.x.assign(dom.ncells(), 0.0);
  Xi0.y.assign(dom.ncells(), 0.0);
  auto v0 = solve_poisson(dom, coeff, H0, Xi0);
  for (double v : v0.v) CHECK(v == 0.0);

  // -Lap v = 1 on the unit disk: v = (1-|x|^2)/4, error dominated by the
  // first-order boundary band
  DiscreteField H1;
  H1.v.assign(dom.ncells(), 1.0);
  auto v1_32 = solve_poisson(dom, coeff, H1, Xi0);
  auto exact32 = field_from_function(dom, [](Pt p) {
    return 0.25 * (1.0 - p[0] * p[0] - p[1] * p[1]);
  });
  double err32 = max_abs_diff(v1_32.v, exact32.v);

  auto dom64 = disk(1.0 / 64.0);
  auto coeff64 = CoefficientField::identity(dom64);
  DiscreteField H164;
  H164.v.assign(dom64.ncells(), 1.0);
  VectorField Xi064;
  Xi064.x.assign(dom64.ncells(), 0.0);
  Xi064.y.assign(dom64.ncells(), 0.0);
  auto v1_64 = solve_poisson(dom64, coeff64, H164, Xi064);
  auto exact64 = field_from_function(dom64, [](Pt p) {
    return 0.25 * (1.0 - p[0] * p[0] - p[1] * p[1]);
  });
  double err64 = max_abs_diff(v1_64.v, exact64.v);
  MESSAGE("poisson radial errors: h=1/32 -> ", err32, ", h=1/64 -> ", err64);
  CHECK(err64 <= 0.7 * err32);  // first-order decrease from the band
  CHECK(err64 <= 0.02);

  // divergence data built from the matching face gradient recovers w
  DiscreteField w = field_from_function(dom, [](Pt p) {
    double r2 = p[0] * p[0] + p[1] * p[1];
    return std::max(0.0, 0.25 - r2) * 4.0;
  });
  FaceField Xw = face_gradient(dom, w);
  DiscreteField vw = solve_poisson_face(dom, coeff, H0, Xw);
  CHECK(max_abs_diff(vw.v, w.v) <= 1e-7);
}

TEST_CASE("elliptic measure: mass one, harmonicity, center-pole oracle") {
  auto dom = disk(1.0 / 48.0);
  auto coeff = CoefficientField::identity(dom);
  // pole nearest to the origin
  int pole = 0;
  double best = 1e9;
  for (int c = 0; c < dom.ncells(); ++c) {
    Pt p = dom.center(c);
    double d = std::hypot(p[0], p[1]);
    if (d < best) {
      best = d;
      pole = c;
    }
  }
  auto est = elliptic_measure(dom, coeff, pole);
  double mass = 0.0;
  for (double m : est.masses) mass += m;
  CHECK(mass == doctest::Approx(1.0).epsilon(1e-8));
  for (double m : est.masses) CHECK(m >= -1e-12);

  // uniform density oracle at the center: the measure is compared on arcs
  // above the staircase scale of the discrete circle, against the exact
  // Poisson kernel of the actual pole position
  const Pt z0 = dom.center(pole);
  const int ns = static_cast<int>(est.masses.size());
  const int arcs = 16;
  double worst = 0.0;
  for (int a = 0; a < arcs; ++a) {
    double m = 0.0, k = 0.0;
    for (int s = a * ns / arcs; s < (a + 1) * ns / arcs; ++s) {
      m += est.masses[s];
      double dx = dom.bsample[s][0] - z0[0], dy = dom.bsample[s][1] - z0[1];
      k += dom.bweight[s] * (1.0 - z0[0] * z0[0] - z0[1] * z0[1]) /
           (2.0 * M_PI * (dx * dx + dy * dy));
    }
    worst = std::max(worst, std::abs(m / k - 1.0));
  }
  MESSAGE("center-pole arc uniformity error: ", worst);
  CHECK(worst <= 0.03);

  // harmonicity: indicator data reproduces the measure of the set
  Rng rng(11);
  std::vector<double> chi(dom.bsample.size(), 0.0);
  double expected = 0.0;
  for (size_t s = 0; s < chi.size(); ++s)
    if (rng.uniform() < 0.3) {
      chi[s] = 1.0;
      expected += est.masses[s];
    }
  auto u = solve_dirichlet(dom, coeff, chi);
  CHECK(u.v[pole] == doctest::Approx(expected).epsilon(1e-7));
}

TEST_CASE("halfspace box: poisson kernel profile away from the sides") {
  DomainParams prm;
  prm.h = 1.0 / 64.0;
  prm.width = 2.0;   // keep the artificial truncation far from the window
  prm.height = 2.0;
  auto dom = build_domain("halfspace_box", prm);
  auto coeff = CoefficientField::identity(dom);
  // the one-cell Dirichlet band carries the data at height h/2, so the
  // kernel sees the pole at that offset
  const double t = 0.125, x0 = 1.0;
  int pole = -1;
  double bestd = 1e9;
  for (int c = 0; c < dom.ncells(); ++c) {
    Pt p = dom.center(c);
    double d = std::hypot(p[0] - x0, p[1] - (t + 0.5 * dom.h));
    if (d < bestd) {
      bestd = d;
      pole = c;
    }
  }
  auto est = elliptic_measure(dom, coeff, pole);
  const Pt pp = dom.center(pole);
  const double te = pp[1] - 0.5 * dom.h, xe = pp[0];
  double worst = 0.0;
  for (size_t s = 0; s < est.masses.size(); ++s) {
    double sx = dom.bsample[s][0] - xe;
    if (std::abs(sx) > 0.25) continue;
    double kernel = te / (M_PI * (te * te + sx * sx));
    double dens = est.masses[s] / dom.bweight[s];
    worst = std::max(worst, std::abs(dens / kernel - 1.0));
  }
  MESSAGE("half-plane kernel relative error: ", worst);
  CHECK(worst <= 0.05);
}

TEST_CASE("bourgain lemma and green function bound, measured constants") {
  auto dom = disk(1.0 / 32.0);
  auto coeff = CoefficientField::identity(dom);
  Rng rng(3);
  double bourgain_c = 1e9;
  double green_ratio = 0.0;
  for (int trial = 0; trial < 4; ++trial) {
    int s = static_cast<int>(rng.index(dom.bsample.size()));
    const Pt xi = dom.bsample[s];
    double r = dom.diameter / (4 << rng.index(2));
    // poles inside B(xi, r)
    for (int c = 0; c < dom.ncells(); ++c) {
      Pt p = dom.center(c);
      if (std::hypot(p[0] - xi[0], p[1] - xi[1]) > r || dom.delta[c] < 4.0 * dom.h) continue;
      if (rng.uniform() > 0.02) continue;  // sampled poles
      auto est = elliptic_measure(dom, coeff, c);
      double m2 = 0.0;
      for (size_t q = 0; q < est.masses.size(); ++q)
        if (std::hypot(dom.bsample[q][0] - xi[0], dom.bsample[q][1] - xi[1]) <= 2.0 * r)
          m2 += est.masses[q];
      bourgain_c = std::min(bourgain_c, m2);
    }
    // green bound: poles outside 2B vs values inside B
    for (int trial2 = 0; trial2 < 2; ++trial2) {
      int pole = static_cast<int>(rng.index(dom.ncells()));
      Pt py = dom.center(pole);
      if (std::hypot(py[0] - xi[0], py[1] - xi[1]) <= 2.0 * r || dom.delta[pole] < 4.0 * dom.h)
        continue;
      auto g = green_function(dom, coeff, pole);
      auto est = elliptic_measure(dom, coeff, pole);
      double m4 = 0.0;
      for (size_t q = 0; q < est.masses.size(); ++q)
        if (std::hypot(dom.bsample[q][0] - xi[0], dom.bsample[q][1] - xi[1]) <= 4.0 * r)
          m4 += est.masses[q];
      for (int c = 0; c < dom.ncells(); ++c) {
        Pt p = dom.center(c);
        if (std::hypot(p[0] - xi[0], p[1] - xi[1]) <= r && m4 > 0)
          green_ratio = std::max(green_ratio, g.v[c] / m4);
      }
    }
  }
  MESSAGE("bourgain c = ", bourgain_c, ", green/measure ratio = ", green_ratio);
  CHECK(bourgain_c > 0.01);
  CHECK(std::isfinite(green_ratio));
}

TEST_CASE("field exports and the mollified measure flag") {
  auto dom = disk(1.0 / 24.0);
  auto coeff = CoefficientField::identity(dom);
  auto u = field_from_function(dom, [](Pt p) { return p[0] + p[1]; });
  auto csv = field_csv(dom, u);
  CHECK(csv.find("i,j,value") == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == dom.ncells() + 1);
  auto svg = field_heatmap(dom, u, "u");
  CHECK(svg.find("<svg") != std::string::npos);

  // fidelity route: mollified indicator solve approaches the exact masses
  int pole = 0;
  double best = 1e9;
  for (int c = 0; c < dom.ncells(); ++c) {
    Pt p = dom.center(c);
    double d = std::hypot(p[0], p[1]);
    if (d < best) { best = d; pole = c; }
  }
  std::vector<int> arc;
  for (size_t s = 0; s < dom.bsample.size() / 4; ++s) arc.push_back(static_cast<int>(s));
  double exact = measure_of_set(dom, coeff, pole, arc);
  double moll = measure_of_set(dom, coeff, pole, arc, 3.0 * dom.h);
  CHECK(exact > 0.1);
  CHECK(std::abs(moll - exact) <= 0.05);
}

TEST_CASE("solver failure reports the residual history") {
  auto dom = disk(1.0 / 32.0);
  auto coeff = CoefficientField::identity(dom);
  std::vector<double> f(dom.bsample.size(), 0.0);
  f[0] = 1.0;
  SolverOptions opts;
  opts.maxiter = 3;
  CHECK_THROWS_WITH_AS(solve_dirichlet(dom, coeff, f, opts),
                       doctest::Contains("residual history"), std::runtime_error);
}
