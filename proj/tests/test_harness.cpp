#include <doctest.h>

#include "dhsys/harness.hpp"

using namespace dhsys;

namespace {

GeneratorConfig config(SystemKind kind, std::size_t n, std::uint64_t seed, Perturbation mode) {
  GeneratorConfig c;
  c.kind = kind;
  c.n = n;
  c.max_dim = 6;
  c.seed = seed;
  c.mode = mode;
  return c;
}

const std::vector<Rat> grid{Rat(2), Rat(4), Rat(8), Rat(16), Rat(32)};

}  // namespace

TEST_CASE("generation is deterministic") {
  for (std::uint64_t seed = 1; seed <= 4; ++seed) {
    Instance a = generate(config(SystemKind::Dh, 2, seed, Perturbation::Transport));
    Instance b = generate(config(SystemKind::Dh, 2, seed, Perturbation::Transport));
    CHECK(a.dh.w == b.dh.w);
    CHECK(a.dh.f == b.dh.f);
    for (std::size_t j = 0; j < a.dh.n.size(); ++j) CHECK(a.dh.n[j] == b.dh.n[j]);
  }
  CampaignConfig c;
  c.theorem = "deligne";
  c.count = 4;
  CHECK(run_campaign(c).to_text() == run_campaign(c).to_text());
}

TEST_CASE("generated systems validate") {
  for (std::uint64_t seed = 1; seed <= 12; ++seed) {
    for (Perturbation mode : {Perturbation::None, Perturbation::Transport, Perturbation::Hodge, Perturbation::Recombine}) {
      Instance in = generate(config(SystemKind::Dh, 1 + seed % 3, seed, mode));
      CHECK(in.dim() <= 6);
      CHECK(validate_dh(in.dh).ok());
      CHECK(validate_dh(in.dh_orbit).ok());
      if (mode != Perturbation::Hodge) {
        Instance d = generate(config(SystemKind::Deligne, 1 + seed % 3, seed, mode));
        CHECK(validate(d.deligne).ok());
      }
    }
  }
  CHECK_THROWS(generate(config(SystemKind::Deligne, 1, 1, Perturbation::Hodge)));
}

TEST_CASE("orbit traces vanish") {
  for (std::uint64_t seed = 1; seed <= 4; ++seed) {
    Instance in = generate(config(SystemKind::Dh, 1 + seed % 2, seed, Perturbation::None));
    for (TraceQuantity q : {TraceQuantity::Nilpotents, TraceQuantity::Hodge, TraceQuantity::Orbit,
                            TraceQuantity::Splitting, TraceQuantity::Series}) {
      DistanceTrace tr = convergence_trace(in.dh, q, grid, domain_zeta());
      CHECK(tr.converged());
      if (tr.applicable) CHECK(tr.zero());
    }
  }
}

TEST_CASE("transported systems converge to their orbit") {
  int decaying = 0;
  for (std::uint64_t seed = 1; seed <= 4; ++seed) {
    Instance in = generate(config(SystemKind::Dh, 1, seed, Perturbation::Transport));
    if (in.mode != Perturbation::Transport) continue;
    DhData d = derive(in.dh, domain_zeta());
    CHECK(d.fhat == in.dh_orbit.f);
    for (std::size_t j = 0; j < d.nhat.size(); ++j) CHECK(d.nhat[j] == in.dh_orbit.n[j]);
    DistanceTrace tr = convergence_trace(in.dh, TraceQuantity::Nilpotents, grid, domain_zeta());
    CHECK(tr.converged());
    if (tr.decaying()) ++decaying;
  }
  CHECK(decaying > 0);
}

TEST_CASE("trace predicates") {
  DistanceTrace tr;
  tr.points = {{Rat(2), Rat(1)}, {Rat(4), Rat(1, 4)}, {Rat(8), Rat(1, 16)}};
  CHECK(tr.decaying());
  CHECK(!tr.zero());
  tr.points[2].second = Rat(1, 4);
  CHECK(!tr.decaying());
  tr.points = {{Rat(2), Rat(1)}, {Rat(4), Rat(1, 2)}};
  CHECK(!tr.decaying());
  // d t^2 = 1, 2, 1, 1/2: the constant comes from the first half.
  tr.points = {{Rat(2), Rat(1, 4)}, {Rat(4), Rat(1, 8)}, {Rat(8), Rat(1, 64)}, {Rat(16), Rat(1, 512)}};
  CHECK(tr.decaying());
  // d t^2 = 1, 1/2, 8/5: decreasing, but the tail escapes the fitted bound.
  tr.points = {{Rat(2), Rat(1, 4)}, {Rat(4), Rat(1, 32)}, {Rat(8), Rat(1, 40)}};
  CHECK(!tr.decaying());
  tr.points = {{Rat(2), Rat(0)}, {Rat(4), Rat(0)}};
  CHECK(tr.zero());
  CHECK(tr.converged());
  tr.residual_lowering = false;
  CHECK(!tr.converged());
  tr.applicable = false;
  CHECK(tr.converged());
}

TEST_CASE("rays") {
  auto y = ray(3, Rat(2));
  REQUIRE(y.size() == 3);
  CHECK(y[0] == Rat(64));
  CHECK(y[1] == Rat(16));
  CHECK(y[2] == Rat(4));
  CHECK(distance(Mat::identity(2), GRat(Rat(3)) * Mat::identity(2)) == Rat(4));
}

TEST_CASE("small campaigns pass") {
  for (const std::string& name : campaign_names()) {
    if (name == "recombination" || name == "imhm" || name == "sl2" || name == "convergence") continue;
    CampaignConfig c;
    c.theorem = name;
    c.count = 3;
    c.max_dim = 4;
    CampaignReport r = run_campaign(c);
    INFO(r.to_text());
    CHECK(r.ok());
    CHECK(r.results.size() == 3);
  }
  CampaignConfig bad;
  bad.theorem = "nope";
  CHECK_THROWS_AS(run_campaign(bad), std::invalid_argument);
}
