#include "dhsys/io.hpp"

#include <fstream>
#include <map>
#include <optional>
#include <sstream>

namespace dhsys {

namespace {

struct Line {
  std::size_t no = 0;
  std::string text;
};

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> words(const std::string& s) {
  std::istringstream in(s);
  std::vector<std::string> out;
  for (std::string w; in >> w;) out.push_back(w);
  return out;
}

struct Body {
  std::optional<std::size_t> dim;
  std::size_t dim_line = 0;
  std::map<int, Subspace> w, alpha, f;
  std::size_t w_line = 0, alpha_line = 0, f_line = 0;
  std::map<int, Mat> n;
};

class Reader {
 public:
  Reader(const std::string& text, std::string source) : source_(std::move(source)) {
    std::istringstream in(text);
    std::size_t no = 0;
    for (std::string raw; std::getline(in, raw);) {
      ++no;
      auto hash = raw.find('#');
      if (hash != std::string::npos) raw.erase(hash);
      std::string t = trim(raw);
      if (!t.empty()) lines_.push_back({no, t});
    }
  }

  [[noreturn]] void fail(std::size_t line, const std::string& msg) const {
    throw FormatError(source_ + ":" + std::to_string(line) + ": " + msg);
  }

  bool done() const { return pos_ >= lines_.size(); }
  const Line& peek() const { return lines_[pos_]; }
  const Line& next() {
    if (done()) fail(lines_.empty() ? 0 : lines_.back().no, "unexpected end of file");
    return lines_[pos_++];
  }

  GRat scalar(const std::string& tok, std::size_t line) const {
    try {
      return parse_grat(tok);
    } catch (const ParseError& e) {
      fail(line, e.what());
    }
  }

  Vec vector(const std::string& inner, std::size_t dim, std::size_t line) const {
    Vec v;
    std::istringstream in(inner);
    for (std::string tok; std::getline(in, tok, ',');) {
      tok = trim(tok);
      if (tok.empty()) fail(line, "empty vector entry");
      v.push_back(scalar(tok, line));
    }
    if (v.size() != dim) fail(line, "vector has " + std::to_string(v.size()) + " entries, expected " + std::to_string(dim));
    return v;
  }

  // "<int>: (..) (..)" after the label.
  std::pair<int, Subspace> step(const std::string& rest, std::size_t dim, std::size_t line) const {
    auto colon = rest.find(':');
    if (colon == std::string::npos) fail(line, "expected '<index>: vectors'");
    int idx = integer(trim(rest.substr(0, colon)), line);
    std::string tail = rest.substr(colon + 1);
    std::vector<Vec> vs;
    std::size_t at = 0;
    while (true) {
      auto open = tail.find_first_not_of(" \t", at);
      if (open == std::string::npos) break;
      if (tail[open] != '(') fail(line, "expected '(' to start a vector");
      auto close = tail.find(')', open);
      if (close == std::string::npos) fail(line, "unterminated vector");
      vs.push_back(vector(tail.substr(open + 1, close - open - 1), dim, line));
      at = close + 1;
    }
    return {idx, Subspace::span(dim, vs)};
  }

  int integer(const std::string& tok, std::size_t line) const {
    try {
      std::size_t used = 0;
      long v = std::stol(tok, &used);
      if (used != tok.size() || v < -100000 || v > 100000) throw std::invalid_argument(tok);
      return static_cast<int>(v);
    } catch (const std::exception&) {
      fail(line, "expected an integer, got '" + tok + "'");
    }
  }

  std::size_t count(const std::string& tok, std::size_t line) const {
    int v = integer(tok, line);
    if (v < 0) fail(line, "expected a non-negative integer");
    return static_cast<std::size_t>(v);
  }

  Mat matrix(std::size_t rows, std::size_t cols) {
    Mat m(rows, cols);
    for (std::size_t r = 0; r < rows; ++r) {
      const Line& l = next();
      auto toks = words(l.text);
      if (toks.size() != cols) fail(l.no, "matrix row has " + std::to_string(toks.size()) + " entries, expected " + std::to_string(cols));
      for (std::size_t c = 0; c < cols; ++c) m(r, c) = scalar(toks[c], l.no);
    }
    return m;
  }

  // Reads system lines until `end` (nested) or a header key (top level).
  Body body(bool nested) {
    Body b;
    while (!done()) {
      const Line& l = peek();
      auto toks = words(l.text);
      const std::string& key = toks[0];
      if (nested && key == "end") {
        ++pos_;
        return b;
      }
      if (key == "dim") {
        ++pos_;
        if (b.dim) fail(l.no, "duplicate dim");
        if (toks.size() != 2) fail(l.no, "expected 'dim <count>'");
        b.dim = count(toks[1], l.no);
        b.dim_line = l.no;
        continue;
      }
      if (key != "W" && key != "N" && key != "alpha" && key != "F") {
        if (nested) fail(l.no, "unexpected '" + key + "' inside a system block");
        return b;
      }
      ++pos_;
      if (!b.dim) fail(l.no, "'" + key + "' before dim");
      const std::size_t d = *b.dim;
      if (key == "N") {
        if (toks.size() != 2) fail(l.no, "expected 'N <index>'");
        int j = integer(toks[1], l.no);
        if (b.n.count(j)) fail(l.no, "duplicate N " + toks[1]);
        b.n[j] = matrix(d, d);
        continue;
      }
      auto [idx, sub] = step(l.text.substr(key.size()), d, l.no);
      auto& target = key == "W" ? b.w : key == "alpha" ? b.alpha : b.f;
      auto& where = key == "W" ? b.w_line : key == "alpha" ? b.alpha_line : b.f_line;
      if (target.count(idx)) fail(l.no, "duplicate " + key + " " + std::to_string(idx));
      if (!where) where = l.no;
      target[idx] = sub;
    }
    if (nested) fail(lines_.empty() ? 0 : lines_.back().no, "missing 'end'");
    return b;
  }

  std::size_t last_line() const { return lines_.empty() ? 0 : lines_.back().no; }

 private:
  std::string source_;
  std::vector<Line> lines_;
  std::size_t pos_ = 0;
};

struct Header {
  std::optional<int> version;
  std::optional<InstanceFile::Kind> kind;
  std::optional<SystemKind> system;
  std::optional<Field> field;
  std::optional<std::size_t> n;
};

std::vector<Mat> operators(Reader& r, const Body& b, std::size_t n, std::size_t line) {
  std::vector<Mat> out;
  for (std::size_t j = 1; j <= n; ++j) {
    auto it = b.n.find(static_cast<int>(j));
    if (it == b.n.end()) r.fail(line, "missing N " + std::to_string(j));
    out.push_back(it->second);
  }
  if (b.n.size() != n) r.fail(line, "N indices must be 1.." + std::to_string(n));
  return out;
}

void require_real(Reader& r, const Body& b, std::size_t line) {
  for (const auto& [w, s] : b.w)
    if (!s.is_real()) r.fail(b.w_line, "W has non-rational entries in a rat system");
  for (const auto& [j, m] : b.n)
    if (!m.is_real()) r.fail(line, "N " + std::to_string(j) + " has non-rational entries in a rat system");
  for (const auto& [w, s] : b.alpha)
    if (!s.is_real()) r.fail(b.alpha_line, "alpha has non-rational entries in a rat system");
}

template <class F>
auto guarded(Reader& r, std::size_t line, F&& build) {
  try {
    return build();
  } catch (const FormatError&) {
    throw;
  } catch (const std::exception& e) {
    r.fail(line, e.what());
  }
}

DeligneSystem deligne_of(Reader& r, const Body& b, const Header& h, std::size_t line) {
  if (!b.dim) r.fail(line, "missing dim");
  if (!b.f.empty()) r.fail(b.f_line, "F is not part of a deligne system");
  if (*b.dim > 0 && b.w.empty()) r.fail(line, "missing W");
  if (*b.dim > 0 && b.alpha.empty()) r.fail(line, "missing alpha");
  if (*h.field == Field::Rat) require_real(r, b, line);
  DeligneSystem s;
  s.field = *h.field;
  s.w = guarded(r, b.w_line ? b.w_line : line, [&] { return IncFiltration::from_map(*b.dim, b.w); });
  s.n = operators(r, b, *h.n, line);
  s.alpha = guarded(r, b.alpha_line ? b.alpha_line : line, [&] { return Grading(*b.dim, b.alpha); });
  return s;
}

DHSystem dh_of(Reader& r, const Body& b, const Header& h, std::size_t line) {
  if (!b.dim) r.fail(line, "missing dim");
  if (!b.alpha.empty()) r.fail(b.alpha_line, "alpha is not part of a dh system");
  if (*b.dim > 0 && b.w.empty()) r.fail(line, "missing W");
  if (*b.dim > 0 && b.f.empty()) r.fail(line, "missing F");
  require_real(r, b, line);
  DHSystem s;
  s.w = guarded(r, b.w_line ? b.w_line : line, [&] { return IncFiltration::from_map(*b.dim, b.w); });
  s.n = operators(r, b, *h.n, line);
  s.f = guarded(r, b.f_line ? b.f_line : line, [&] { return DecFiltration::from_map(*b.dim, b.f); });
  return s;
}

}  // namespace

InstanceFile parse_instance(const std::string& text, const std::string& source) {
  Reader r(text, source);
  Header h;
  InstanceFile out;
  std::optional<Body> top, source_body, target_body;
  std::size_t top_line = 0, source_line = 0, target_line = 0, map_line = 0;
  std::optional<Mat> map;

  while (!r.done()) {
    const Line l = r.peek();
    auto toks = words(l.text);
    const std::string& key = toks[0];
    auto one = [&]() -> const std::string& {
      if (toks.size() != 2) r.fail(l.no, "expected '" + key + " <value>'");
      return toks[1];
    };
    if (key == "format-version") {
      r.next();
      if (h.version) r.fail(l.no, "duplicate format-version");
      h.version = r.integer(one(), l.no);
      if (*h.version != 1) r.fail(l.no, "unsupported format-version " + toks[1]);
    } else if (key == "kind") {
      r.next();
      if (h.kind) r.fail(l.no, "duplicate kind");
      const std::string& v = one();
      if (v == "deligne") h.kind = InstanceFile::Kind::Deligne;
      else if (v == "dh") h.kind = InstanceFile::Kind::Dh;
      else if (v == "morphism") h.kind = InstanceFile::Kind::Morphism;
      else r.fail(l.no, "kind must be deligne, dh or morphism");
    } else if (key == "system") {
      r.next();
      if (h.system) r.fail(l.no, "duplicate system");
      auto k = parse_kind(one());
      if (!k) r.fail(l.no, "system must be deligne or dh");
      h.system = k;
    } else if (key == "field") {
      r.next();
      if (h.field) r.fail(l.no, "duplicate field");
      const std::string& v = one();
      if (v == "rat") h.field = Field::Rat;
      else if (v == "gauss") h.field = Field::Gauss;
      else r.fail(l.no, "field must be rat or gauss");
    } else if (key == "n") {
      r.next();
      if (h.n) r.fail(l.no, "duplicate n");
      h.n = r.count(one(), l.no);
    } else if (key == "expect") {
      r.next();
      if (toks.size() != 3) r.fail(l.no, "expected 'expect <key> <value>'");
      out.expect.emplace_back(toks[1], toks[2]);
    } else if (key == "begin") {
      r.next();
      const std::string& v = one();
      if (v != "source" && v != "target") r.fail(l.no, "expected 'begin source' or 'begin target'");
      auto& slot = v == "source" ? source_body : target_body;
      if (slot) r.fail(l.no, "duplicate " + v + " block");
      (v == "source" ? source_line : target_line) = l.no;
      slot = r.body(true);
    } else if (key == "map") {
      r.next();
      if (map) r.fail(l.no, "duplicate map");
      if (toks.size() != 1) r.fail(l.no, "expected 'map' on its own line");
      if (!source_body || !target_body || !source_body->dim || !target_body->dim)
        r.fail(l.no, "map must follow the source and target blocks");
      map_line = l.no;
      map = r.matrix(*target_body->dim, *source_body->dim);
    } else if (key == "dim" || key == "W" || key == "N" || key == "alpha" || key == "F") {
      if (top) r.fail(l.no, "system fields must form one block");
      top_line = l.no;
      top = r.body(false);
    } else {
      r.fail(l.no, "unknown key '" + key + "'");
    }
  }

  const std::size_t end = r.last_line();
  if (!h.version) r.fail(end, "missing format-version");
  if (!h.kind) r.fail(end, "missing kind");
  if (!h.field) r.fail(end, "missing field");
  if (!h.n) r.fail(end, "missing n");
  out.kind = *h.kind;
  if (out.kind == InstanceFile::Kind::Morphism) {
    if (top) r.fail(top_line, "a morphism file keeps its systems in begin/end blocks");
    if (!h.system) r.fail(end, "missing system");
    if (!source_body) r.fail(end, "missing source block");
    if (!target_body) r.fail(end, "missing target block");
    if (!map) r.fail(end, "missing map");
    out.system = *h.system;
    if (out.system == SystemKind::Dh) {
      if (*h.field != Field::Rat) r.fail(end, "dh systems use field rat");
      out.dh_map = {dh_of(r, *source_body, h, source_line), dh_of(r, *target_body, h, target_line), *map};
      if (!out.dh_map.map.is_real()) r.fail(map_line, "map has non-rational entries");
    } else {
      out.deligne_map = {deligne_of(r, *source_body, h, source_line), deligne_of(r, *target_body, h, target_line), *map};
      if (*h.field == Field::Rat && !map->is_real()) r.fail(map_line, "map has non-rational entries in a rat system");
    }
    return out;
  }
  if (source_body || target_body || map) r.fail(source_line ? source_line : map_line, "begin/map blocks belong to morphism files");
  if (h.system) r.fail(end, "'system' belongs to morphism files");
  if (!top) r.fail(end, "missing system fields");
  if (out.kind == InstanceFile::Kind::Dh) {
    if (*h.field != Field::Rat) r.fail(end, "dh systems use field rat");
    out.system = SystemKind::Dh;
    out.dh = dh_of(r, *top, h, top_line);
  } else {
    out.system = SystemKind::Deligne;
    out.deligne = deligne_of(r, *top, h, top_line);
  }
  return out;
}

InstanceFile read_instance(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError(path + ": cannot open file");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_instance(buf.str(), path);
}

std::string format_vector(const Vec& v) {
  std::string out = "(";
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ", ";
    out += to_string(v[i]);
  }
  return out + ")";
}

namespace {

std::string span_text(const Subspace& s) {
  std::string out;
  const Mat& b = s.basis();
  for (std::size_t r = 0; r < b.rows(); ++r) {
    Vec v(b.cols());
    for (std::size_t c = 0; c < b.cols(); ++c) v[c] = b(r, c);
    out += " " + format_vector(v);
  }
  return out;
}

std::string step_line(const std::string& label, int idx, const Subspace& s) {
  return label + " " + std::to_string(idx) + ":" + span_text(s) + "\n";
}

std::string body_text(const DeligneSystem* d, const DHSystem* h) {
  const IncFiltration& w = d ? d->w : h->w;
  const std::vector<Mat>& n = d ? d->n : h->n;
  std::string out = "dim " + std::to_string(w.ambient_dim()) + "\n";
  out += format_filtration("W", w);
  for (std::size_t j = 0; j < n.size(); ++j) out += "N " + std::to_string(j + 1) + "\n" + format_matrix(n[j]);
  if (d) out += format_grading("alpha", d->alpha);
  else out += format_filtration("F", h->f);
  return out;
}

std::string field_name(Field f) { return f == Field::Gauss ? "gauss" : "rat"; }

}  // namespace

std::string format_matrix(const Mat& m, const std::string& indent) {
  std::string out;
  for (std::size_t r = 0; r < m.rows(); ++r) {
    out += indent;
    for (std::size_t c = 0; c < m.cols(); ++c) {
      if (c) out += " ";
      out += to_string(m(r, c));
    }
    out += "\n";
  }
  return out;
}

std::string format_filtration(const std::string& label, const IncFiltration& w) {
  std::string out;
  if (w.ambient_dim() == 0) return out;
  for (int k = w.lo(); k <= w.hi(); ++k)
    if (k == w.lo() || !(w.step(k) == w.step(k - 1))) out += step_line(label, k, w.step(k));
  return out;
}

std::string format_filtration(const std::string& label, const DecFiltration& f) {
  std::string out;
  if (f.ambient_dim() == 0) return out;
  for (int p = f.lo(); p <= f.hi(); ++p)
    if (!(f.step(p) == f.step(p + 1))) out += step_line(label, p, f.step(p));
  return out;
}

std::string format_grading(const std::string& label, const Grading& g) {
  std::string out;
  for (const auto& [w, part] : g.parts()) out += step_line(label, w, part);
  return out;
}

std::string print_instance(const InstanceFile& f) {
  std::string out = "format-version 1\n";
  switch (f.kind) {
    case InstanceFile::Kind::Deligne:
      out += "kind deligne\nfield " + field_name(f.deligne.field) + "\nn " + std::to_string(f.deligne.vars()) + "\n";
      out += body_text(&f.deligne, nullptr);
      break;
    case InstanceFile::Kind::Dh:
      out += "kind dh\nfield rat\nn " + std::to_string(f.dh.vars()) + "\n";
      out += body_text(nullptr, &f.dh);
      break;
    case InstanceFile::Kind::Morphism:
      out += "kind morphism\nsystem " + to_string(f.system) + "\n";
      if (f.system == SystemKind::Dh) {
        out += "field rat\nn " + std::to_string(f.dh_map.source.vars()) + "\n";
        out += "begin source\n" + body_text(nullptr, &f.dh_map.source) + "end\n";
        out += "begin target\n" + body_text(nullptr, &f.dh_map.target) + "end\n";
        out += "map\n" + format_matrix(f.dh_map.map);
      } else {
        out += "field " + field_name(f.deligne_map.source.field) + "\nn " + std::to_string(f.deligne_map.source.vars()) + "\n";
        out += "begin source\n" + body_text(&f.deligne_map.source, nullptr) + "end\n";
        out += "begin target\n" + body_text(&f.deligne_map.target, nullptr) + "end\n";
        out += "map\n" + format_matrix(f.deligne_map.map);
      }
      break;
  }
  for (const auto& [k, v] : f.expect) out += "expect " + k + " " + v + "\n";
  return out;
}

InstanceFile instance_of(const DeligneSystem& s) {
  InstanceFile f;
  f.kind = InstanceFile::Kind::Deligne;
  f.system = SystemKind::Deligne;
  f.deligne = s;
  return f;
}

InstanceFile instance_of(const DHSystem& s) {
  InstanceFile f;
  f.kind = InstanceFile::Kind::Dh;
  f.system = SystemKind::Dh;
  f.dh = s;
  return f;
}

}  // namespace dhsys
