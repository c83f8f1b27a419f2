// The .dsys instance format.
//
//   # comment
//   format-version 1
//   kind deligne            (deligne | dh | morphism)
//   field rat               (rat | gauss)
//   n 1
//   dim 2
//   W 1: (1, 0) (0, 1)      W_1 = span; W_w is the last listed step <= w
//   N 1                     followed by dim rows of scalars
//     0 1
//     0 0
//   alpha 0: (1, 0)         weight parts of the grading
//   alpha 2: (0, 1)
//   F 1: (0, 1)             F^p is the first listed step >= p
//   expect valid true       optional regression pins
//
// A morphism file has `kind morphism`, `system deligne|dh`, the shared
// `field` and `n`, then `begin source` ... `end`, `begin target` ... `end`
// and `map` followed by target-dim rows.
#pragma once

#include <string>
#include <utility>
#include <vector>

#include "dhsys/category.hpp"
#include "dhsys/harness.hpp"

namespace dhsys {

/// Parse failures carry "<source>:<line>: <message>".
class FormatError : public ParseError {
 public:
  using ParseError::ParseError;
};

struct InstanceFile {
  enum class Kind { Deligne, Dh, Morphism };
  Kind kind = Kind::Deligne;
  SystemKind system = SystemKind::Deligne;  // the objects' kind for morphisms
  DeligneSystem deligne;
  DHSystem dh;
  DeligneMorphism deligne_map;
  DhMorphism dh_map;
  std::vector<std::pair<std::string, std::string>> expect;
};

InstanceFile parse_instance(const std::string& text, const std::string& source = "<input>");
/// Throws FormatError when the file cannot be read.
InstanceFile read_instance(const std::string& path);
/// Canonical form: parse(print(x)) == x.
std::string print_instance(const InstanceFile& f);

InstanceFile instance_of(const DeligneSystem& s);
InstanceFile instance_of(const DHSystem& s);

std::string format_vector(const Vec& v);
std::string format_matrix(const Mat& m, const std::string& indent = "  ");
/// One "<label> <w>: vectors" line per jump of the filtration.
std::string format_filtration(const std::string& label, const IncFiltration& w);
std::string format_filtration(const std::string& label, const DecFiltration& f);
std::string format_grading(const std::string& label, const Grading& g);

}  // namespace dhsys
