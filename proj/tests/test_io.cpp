#include <doctest.h>

#include <filesystem>

#include "dhsys/io.hpp"

using namespace dhsys;

namespace {

const std::string data_dir = DHSYS_DATA_DIR;

InstanceFile round_trip(const InstanceFile& f) { return parse_instance(print_instance(f)); }

}  // namespace

TEST_CASE("the shipped P1 instance") {
  InstanceFile f = read_instance(data_dir + "/p1.dsys");
  REQUIRE(f.kind == InstanceFile::Kind::Dh);
  CHECK(f.dh.dim() == 2);
  CHECK(f.dh.w == IncFiltration::pure(2, 1));
  CHECK(f.dh.n[0](0, 1) == GRat(1));
  CHECK(f.dh.f.step(1) == Subspace::span(2, {{GRat(0), GRat(1)}}));
  CHECK(f.dh.f.step(2).is_zero());
  CHECK(validate_dh(f.dh).ok());
  REQUIRE(f.expect.size() == 2);
  CHECK(f.expect[0] == std::pair<std::string, std::string>{"valid", "true"});
}

TEST_CASE("parse, print, parse is the identity on shipped files") {
  for (const auto& entry : std::filesystem::directory_iterator(data_dir)) {
    if (entry.path().extension() != ".dsys") continue;
    INFO(entry.path().string());
    InstanceFile f = read_instance(entry.path().string());
    std::string text = print_instance(f);
    CHECK(print_instance(parse_instance(text)) == text);
  }
}

TEST_CASE("generated instances round trip") {
  for (std::uint64_t seed = 1; seed <= 6; ++seed) {
    for (SystemKind kind : {SystemKind::Deligne, SystemKind::Dh}) {
      GeneratorConfig c;
      c.kind = kind;
      c.n = 1 + seed % 3;
      c.max_dim = 6;
      c.seed = seed;
      c.mode = Perturbation::Transport;
      Instance in = generate(c);
      if (kind == SystemKind::Dh) {
        InstanceFile f = round_trip(instance_of(in.dh));
        CHECK(f.dh.w == in.dh.w);
        CHECK(f.dh.f == in.dh.f);
        for (std::size_t j = 0; j < in.dh.n.size(); ++j) CHECK(f.dh.n[j] == in.dh.n[j]);
      } else {
        InstanceFile f = round_trip(instance_of(in.deligne));
        CHECK(f.deligne.w == in.deligne.w);
        CHECK(f.deligne.alpha == in.deligne.alpha);
        for (std::size_t j = 0; j < in.deligne.n.size(); ++j) CHECK(f.deligne.n[j] == in.deligne.n[j]);
      }
    }
  }
  DhMorphism m = random_dh_morphism(4, 6);
  InstanceFile mf;
  mf.kind = InstanceFile::Kind::Morphism;
  mf.system = SystemKind::Dh;
  mf.dh_map = m;
  InstanceFile back = round_trip(mf);
  CHECK(back.dh_map.map == m.map);
  CHECK(back.dh_map.source.f == m.source.f);
  CHECK(back.dh_map.target.w == m.target.w);
}

TEST_CASE("malformed files are rejected with a location") {
  std::size_t seen = 0;
  for (const auto& entry : std::filesystem::directory_iterator(data_dir + "/malformed")) {
    INFO(entry.path().string());
    ++seen;
    try {
      read_instance(entry.path().string());
      FAIL("parsed a malformed file");
    } catch (const FormatError& e) {
      CHECK(std::string(e.what()).find(entry.path().string() + ":") == 0);
    }
  }
  CHECK(seen >= 10);
  CHECK_THROWS_AS(read_instance(data_dir + "/does-not-exist.dsys"), FormatError);
}

TEST_CASE("diagnostics name the line") {
  const std::string text = "format-version 1\nkind deligne\nfield rat\nn 1\ndim 2\nW 1: (1, 0) (0, 1)\nN 1\n  0 x\n  0 0\n";
  try {
    parse_instance(text, "t");
    FAIL("expected a parse error");
  } catch (const FormatError& e) {
    CHECK(std::string(e.what()).rfind("t:8:", 0) == 0);
  }
  CHECK_THROWS_AS(parse_instance("format-version 1\nkind deligne\nfield gauss\nn 0\ndim 1\nW 0: (1)\nF 0: (1)\n"), FormatError);
}

TEST_CASE("scalar syntax") {
  InstanceFile f = parse_instance(
      "format-version 1\nkind deligne\nfield gauss\nn 0\ndim 2\nW 0: (1, -1/2+3i) (0, 1)\nalpha 0: (1, 0) (0, 1)\n");
  CHECK(f.deligne.field == Field::Gauss);
  CHECK(f.deligne.w.step(0).is_full());
  CHECK(format_vector({GRat(Rat(-1, 2), Rat(3)), GRat(Rat(0), Rat(-1))}) == "(-1/2+3i, -i)");
}
