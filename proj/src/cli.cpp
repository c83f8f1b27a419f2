#include "dhsys/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <fstream>
#include <memory>
#include <ostream>
#include <random>
#include <sstream>

#include "dhsys/io.hpp"

namespace dhsys {

namespace {

enum Exit { Pass = 0, MathFailure = 1, InputError = 2 };

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Options {
  std::string file, what, theorem, output, csv;
  std::string t_grid = "2,4,8,16,32";
  std::string a_grid = "1,4,16,64,256";
  std::string zeta = "zero-only";
  std::uint64_t seed = 1;
  std::size_t jobs = 1;
  // generate / campaign
  std::string kind = "dh", mode = "none";
  std::size_t n = 1, max_dim = 8, count = 10, n_max = 2;
  bool morphism = false;
};

std::vector<Rat> parse_grid(const std::string& text, const std::string& flag) {
  std::vector<Rat> out;
  std::istringstream in(text);
  for (std::string tok; std::getline(in, tok, ',');) {
    try {
      out.push_back(parse_rat(tok));
    } catch (const ParseError& e) {
      throw UsageError(flag + ": " + e.what());
    }
    if (sgn(out.back()) <= 0) throw UsageError(flag + ": grid values must be positive");
  }
  if (out.empty()) throw UsageError(flag + ": empty grid");
  return out;
}

std::unique_ptr<ZetaProvider> make_zeta(const std::string& name) {
  if (name == "zero-only") return std::make_unique<ZeroOnlyZeta>();
  if (name == "domain") return std::make_unique<TableZeta>(TableZeta::parse("0 d(-1,-1)"));
  if (name.rfind("table:", 0) == 0) {
    const std::string path = name.substr(6);
    std::ifstream in(path);
    if (!in) throw FormatError(path + ": cannot open zeta table");
    std::ostringstream buf;
    buf << in.rdbuf();
    try {
      return std::make_unique<TableZeta>(TableZeta::parse(buf.str()));
    } catch (const std::exception& e) {
      throw FormatError(path + ": " + e.what());
    }
  }
  throw UsageError("--zeta-provider must be zero-only, domain or table:<path>");
}

class Sink {
 public:
  Sink(const std::string& path, std::ostream& fallback) : path_(path), out_(fallback) {}
  std::ostream& stream() { return path_.empty() ? out_ : buf_; }
  void flush() {
    if (path_.empty()) return;
    std::ofstream f(path_, std::ios::binary);
    if (!f || !(f << buf_.str())) throw FormatError(path_ + ": cannot write");
  }

 private:
  std::string path_;
  std::ostream& out_;
  std::ostringstream buf_;
};

void write_file(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f || !(f << text)) throw FormatError(path + ": cannot write");
}

std::string kind_name(const InstanceFile& f) {
  switch (f.kind) {
    case InstanceFile::Kind::Deligne:
      return "deligne";
    case InstanceFile::Kind::Dh:
      return "dh";
    default:
      return "morphism (" + to_string(f.system) + ")";
  }
}

ValidationReport validation(const InstanceFile& f) {
  return f.kind == InstanceFile::Kind::Dh ? validate_dh(f.dh) : validate(f.deligne);
}

std::string tower_text(const std::vector<IncFiltration>& tower) {
  std::string out;
  for (std::size_t j = 0; j < tower.size(); ++j) out += format_filtration("W(" + std::to_string(j) + ")", tower[j]);
  return out;
}

bool expectation_holds(const InstanceFile& f, const std::string& key, const std::string& value, bool valid,
                       const ZetaProvider& zeta, std::string& why) {
  if (value != "true" && value != "false") {
    why = "value must be true or false";
    return false;
  }
  const bool want = value == "true";
  if (key == "valid") return valid == want;
  if (key == "orbit") {
    if (!valid) {
      why = "system is not valid";
      return !want;
    }
    try {
      bool got = f.kind == InstanceFile::Kind::Dh ? is_orbit(f.dh, zeta) : is_orbit(f.deligne);
      return got == want;
    } catch (const ZetaRejected& e) {
      why = e.what();
      return false;
    }
  }
  why = "unknown expectation";
  return false;
}

int cmd_validate(const Options& o, std::ostream& out) {
  InstanceFile f = read_instance(o.file);
  auto zeta = make_zeta(o.zeta);
  out << "file: " << o.file << "\nkind: " << kind_name(f) << "\n";
  bool ok = true;
  if (f.kind == InstanceFile::Kind::Morphism) {
    const bool dh = f.system == SystemKind::Dh;
    ValidationReport src = dh ? validate_dh(f.dh_map.source) : validate(f.deligne_map.source);
    ValidationReport tgt = dh ? validate_dh(f.dh_map.target) : validate(f.deligne_map.target);
    out << "source:\n" << src.to_text() << "target:\n" << tgt.to_text();
    std::string defect = dh ? morphism_defect(f.dh_map) : morphism_defect(f.deligne_map);
    out << "map " << (defect.empty() ? "pass" : "FAIL: " + defect) << "\n";
    ok = src.ok() && tgt.ok() && defect.empty();
  } else {
    const std::size_t dim = f.kind == InstanceFile::Kind::Dh ? f.dh.dim() : f.deligne.dim();
    const std::size_t n = f.kind == InstanceFile::Kind::Dh ? f.dh.vars() : f.deligne.vars();
    out << "dim: " << dim << "\nn: " << n << "\n";
    ValidationReport rep = validation(f);
    out << rep.to_text();
    if (!rep.tower.empty()) out << "tower:\n" << tower_text(rep.tower);
    ok = rep.ok();
  }
  bool pins = true;
  for (const auto& [key, value] : f.expect) {
    std::string why;
    bool held = f.kind != InstanceFile::Kind::Morphism || key == "valid"
                    ? expectation_holds(f, key, value, ok, *zeta, why)
                    : (why = "only 'valid' applies to morphisms", false);
    out << "expect " << key << " " << value << ": " << (held ? "ok" : "MISMATCH") << (why.empty() ? "" : " (" + why + ")")
        << "\n";
    pins = pins && held;
  }
  out << "result: " << (ok && pins ? "PASS" : "FAIL") << "\n";
  return ok && pins ? Pass : MathFailure;
}

std::string decomposition_text(const OrbitDecomposition& d) {
  std::string out = "pieces: " + std::to_string(d.components.size()) + "\n";
  for (const auto& c : d.components) {
    out += "piece m=(";
    for (std::size_t j = 0; j < c.piece.m.size(); ++j) out += (j ? "," : "") + std::to_string(c.piece.m[j]);
    out += ") k=" + std::to_string(c.piece.k) + " dim=" + std::to_string(c.piece.dim) + "\n";
    if (c.piece.hodge) out += format_filtration("  F", *c.piece.hodge);
  }
  out += "iso\n" + format_matrix(d.iso);
  return out;
}

int cmd_compute(const Options& o, std::ostream& out) {
  static const std::vector<std::string> whats{"tower", "tau", "nhat", "fhat", "orbit", "decompose"};
  if (std::find(whats.begin(), whats.end(), o.what) == whats.end())
    throw UsageError("compute: unknown quantity '" + o.what + "'");
  InstanceFile f = read_instance(o.file);
  if (f.kind == InstanceFile::Kind::Morphism) throw UsageError("compute needs a system file, not a morphism");
  auto zeta = make_zeta(o.zeta);
  ValidationReport rep = validation(f);
  if (!rep.ok()) {
    out << "invalid system:\n" << rep.to_text() << "result: FAIL\n";
    return MathFailure;
  }
  const bool dh = f.kind == InstanceFile::Kind::Dh;
  if (o.what == "fhat" && !dh) throw UsageError("compute fhat needs a dh system");
  Sink sink(o.output, out);
  std::ostream& s = sink.stream();
  try {
    if (o.what == "tower") {
      s << tower_text(rep.tower);
    } else if (o.what == "decompose") {
      bool orbit = dh ? is_orbit(f.dh, *zeta) : is_orbit(f.deligne);
      if (!orbit) {
        out << "not an SL(2)-orbit\nresult: FAIL\n";
        return MathFailure;
      }
      s << decomposition_text(dh ? decompose(f.dh, *zeta) : decompose(f.deligne));
    } else if (o.what == "orbit") {
      s << print_instance(dh ? instance_of(associated_sl2_dh(f.dh, *zeta)) : instance_of(associated_sl2(f.deligne)));
    } else {
      std::vector<Grading> tau;
      std::vector<Mat> nh;
      DecFiltration fh;
      if (dh) {
        DhData d = derive(f.dh, *zeta);
        tau = d.tau;
        nh = d.nhat;
        fh = d.fhat;
      } else {
        tau = tau_tuple(f.deligne, rep.tower);
        nh = nhat(f.deligne, tau);
      }
      if (o.what == "tau") {
        for (std::size_t j = 0; j < tau.size(); ++j) s << format_grading("tau(" + std::to_string(j) + ")", tau[j]);
      } else if (o.what == "nhat") {
        for (std::size_t j = 0; j < nh.size(); ++j) s << "Nhat " << j + 1 << "\n" << format_matrix(nh[j]);
      } else {
        s << format_filtration("Fhat", fh);
      }
    }
  } catch (const ZetaRejected& e) {
    out << "gated: " << e.what() << "\nresult: FAIL\n";
    return MathFailure;
  }
  sink.flush();
  return Pass;
}

void print_result(std::ostream& out, const InstanceResult& r) {
  out << "result: " << (!r.applicable ? "N/A" : r.pass ? "PASS" : "FAIL") << "\n";
  out << "detail: " << r.detail << "\n";
  for (const auto& tr : r.traces) {
    out << "trace " << to_string(tr.quantity) << ":";
    if (!tr.applicable) {
      out << " n/a\n";
      continue;
    }
    for (const auto& [t, d] : tr.points) out << " " << to_string(t) << "=" << to_string(d);
    out << (tr.converged() ? " converged" : " NOT converged") << "\n";
  }
}

int cmd_verify(const Options& o, std::ostream& out) {
  auto names = campaign_names();
  if (std::find(names.begin(), names.end(), o.theorem) == names.end())
    throw UsageError("verify: unknown theorem '" + o.theorem + "'");
  auto zeta = make_zeta(o.zeta);
  const auto t_grid = parse_grid(o.t_grid, "--t-grid");
  const auto a_grid = parse_grid(o.a_grid, "--a-grid");
  InstanceFile f = read_instance(o.file);
  out << "verify " << o.theorem << " " << o.file << "\n";

  InstanceResult r;
  if (o.theorem == "abelian") {
    if (f.kind != InstanceFile::Kind::Morphism) throw UsageError("verify abelian needs a morphism file");
    r = f.system == SystemKind::Dh ? check_abelian(f.dh_map) : check_abelian(f.deligne_map);
    print_result(out, r);
    return r.pass || !r.applicable ? Pass : MathFailure;
  }
  if (f.kind == InstanceFile::Kind::Morphism) throw UsageError("verify " + o.theorem + " needs a system file");
  ValidationReport rep = validation(f);
  if (!rep.ok()) {
    out << "invalid system:\n" << rep.to_text() << "result: FAIL\n";
    return MathFailure;
  }
  try {
    const bool dh_input = f.kind == InstanceFile::Kind::Dh;
    auto as_deligne = [&] { return dh_input ? to_deligne(f.dh, *zeta) : f.deligne; };
    auto as_dh = [&] { return dh_input ? f.dh : from_deligne(f.deligne); };
    std::mt19937_64 rng(o.seed);
    const std::string& t = o.theorem;
    if (t == "rmf") r = check_rmf(as_deligne(), rng);
    else if (t == "deligne") r = check_deligne(as_deligne());
    else if (t == "collapse") r = check_collapse(as_deligne(), t_grid);
    else if (t == "recombination") r = check_recombination(as_dh(), a_grid, *zeta);
    else if (t == "imhm") r = check_imhm(as_deligne(), a_grid, *zeta);
    else if (t == "convergence") {
      DHSystem s = as_dh();
      r = check_convergence(s, is_orbit(s, *zeta), t_grid, *zeta);
    } else if (t == "fhat") r = check_fhat(as_dh(), *zeta);
    else if (t == "splitting") r = check_splitting(as_deligne(), *zeta);
    else if (t == "classification") r = dh_input ? check_classification(f.dh, *zeta) : check_classification(f.deligne);
    else r = check_sl2(as_dh(), rng, *zeta);
  } catch (const ZetaRejected& e) {
    r.applicable = false;
    r.detail = e.what();
  }
  print_result(out, r);
  return r.pass || !r.applicable ? Pass : MathFailure;
}

int cmd_generate(const Options& o, std::ostream& out) {
  auto kind = parse_kind(o.kind);
  if (!kind) throw UsageError("--kind must be deligne or dh");
  auto mode = parse_perturbation(o.mode);
  if (!mode) throw UsageError("--mode must be none, transport, hodge or recombine");
  if (o.max_dim == 0) throw UsageError("--max-dim must be positive");
  InstanceFile f;
  if (o.morphism) {
    f.kind = InstanceFile::Kind::Morphism;
    f.system = *kind;
    if (*kind == SystemKind::Dh) f.dh_map = random_dh_morphism(o.seed, o.max_dim);
    else f.deligne_map = random_deligne_morphism(o.seed, o.max_dim);
  } else {
    GeneratorConfig c;
    c.kind = *kind;
    c.n = o.n;
    c.max_dim = o.max_dim;
    c.seed = o.seed;
    c.mode = *mode;
    Instance in;
    try {
      in = generate(c);
    } catch (const std::invalid_argument& e) {
      throw UsageError(e.what());
    }
    f = *kind == SystemKind::Dh ? instance_of(in.dh) : instance_of(in.deligne);
    f.expect.emplace_back("valid", "true");
    if (in.mode == Perturbation::None) f.expect.emplace_back("orbit", "true");
  }
  Sink sink(o.output, out);
  sink.stream() << print_instance(f);
  sink.flush();
  return Pass;
}

int cmd_campaign(const Options& o, std::ostream& out) {
  auto names = campaign_names();
  if (std::find(names.begin(), names.end(), o.theorem) == names.end())
    throw UsageError("campaign: unknown theorem '" + o.theorem + "'");
  auto zeta = make_zeta(o.zeta);
  CampaignConfig c;
  c.theorem = o.theorem;
  c.count = o.count;
  c.n_max = std::max<std::size_t>(1, o.n_max);
  c.max_dim = std::max<std::size_t>(1, o.max_dim);
  c.seed = o.seed;
  c.t_grid = parse_grid(o.t_grid, "--t-grid");
  c.a_grid = parse_grid(o.a_grid, "--a-grid");
  c.jobs = std::max<std::size_t>(1, o.jobs);
  c.zeta = zeta.get();
  CampaignReport r = run_campaign(c);
  Sink sink(o.output, out);
  sink.stream() << "zeta provider: " << o.zeta << "\n" << r.to_text();
  sink.flush();
  if (!o.csv.empty()) write_file(o.csv, r.traces_csv());
  return r.ok() ? Pass : MathFailure;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Deligne and Deligne-Hodge systems: validation, derived data and verification campaigns", "dhsys"};
  app.require_subcommand(1);
  Options o;
  auto grids = [&](CLI::App* sub) {
    sub->add_option("--t-grid", o.t_grid, "comma-separated ray parameters t");
    sub->add_option("--a-grid", o.a_grid, "comma-separated recombination levels");
  };
  auto zeta_flag = [&](CLI::App* sub) {
    sub->add_option("--zeta-provider", o.zeta, "zero-only, domain or table:<path>");
  };

  auto* validate_cmd = app.add_subcommand("validate", "check the axioms of a system or morphism file");
  validate_cmd->add_option("file", o.file)->required();
  zeta_flag(validate_cmd);

  auto* compute = app.add_subcommand("compute", "derived data: tower, tau, nhat, fhat, orbit, decompose");
  compute->add_option("what", o.what)->required();
  compute->add_option("file", o.file)->required();
  compute->add_option("-o,--output", o.output, "write the artifact here instead of stdout");
  zeta_flag(compute);

  auto* verify = app.add_subcommand("verify", "run one theorem check on an instance file");
  verify->add_option("theorem", o.theorem)->required();
  verify->add_option("file", o.file)->required();
  verify->add_option("--seed", o.seed);
  grids(verify);
  zeta_flag(verify);

  auto* gen = app.add_subcommand("generate", "emit a seeded instance file");
  gen->add_option("--kind", o.kind, "deligne or dh");
  gen->add_option("--n", o.n, "number of nilpotents");
  gen->add_option("--max-dim", o.max_dim);
  gen->add_option("--seed", o.seed);
  gen->add_option("--mode", o.mode, "none, transport, hodge or recombine");
  gen->add_flag("--morphism", o.morphism, "emit a random morphism id + 0 instead");
  gen->add_option("-o,--output", o.output);

  auto* camp = app.add_subcommand("campaign", "run a seeded verification campaign");
  camp->add_option("theorem", o.theorem)->required();
  camp->add_option("--count", o.count);
  camp->add_option("--n-max", o.n_max);
  camp->add_option("--max-dim", o.max_dim);
  camp->add_option("--seed", o.seed);
  camp->add_option("--jobs", o.jobs);
  camp->add_option("-o,--output", o.output, "report path");
  camp->add_option("--csv", o.csv, "trace CSV path");
  grids(camp);
  zeta_flag(camp);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return e.get_exit_code() == 0 ? Pass : InputError;
  }

  try {
    if (*validate_cmd) return cmd_validate(o, out);
    if (*compute) return cmd_compute(o, out);
    if (*verify) return cmd_verify(o, out);
    if (*gen) return cmd_generate(o, out);
    return cmd_campaign(o, out);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n";
    return InputError;
  } catch (const ParseError& e) {
    err << "input error: " << e.what() << "\n";
    return InputError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return MathFailure;
  }
}

}  // namespace dhsys
