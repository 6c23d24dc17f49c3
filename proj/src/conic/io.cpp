#include "rab/conic/io.hpp"

#include <fstream>
#include <iomanip>
#include <sstream>

#include "rab/errors.hpp"

namespace rab::conic {

namespace {

char cone_tag(ConeKind k) {
  switch (k) {
    case ConeKind::Zero: return 'Z';
    case ConeKind::Nonneg: return 'L';
    case ConeKind::SecondOrder: return 'Q';
    case ConeKind::Psd: return 'S';
  }
  return '?';
}

class Reader {
public:
  explicit Reader(std::istream& is) : is_(is) {}

  std::istringstream next_line(const char* what) {
    std::string line;
    while (std::getline(is_, line)) {
      ++line_no_;
      const auto first = line.find_first_not_of(" \t\r");
      if (first == std::string::npos || line[first] == '#') continue;
      return std::istringstream(line);
    }
    fail(std::string("unexpected end of input, expected ") + what);
  }

  long keyword(const char* key) {
    auto ls = next_line(key);
    std::string k;
    long v = -1;
    if (!(ls >> k >> v) || k != key || v < 0) fail(std::string("expected '") + key + " <count>'");
    return v;
  }

  [[noreturn]] void fail(const std::string& msg) const {
    throw InvalidInput("conic dump line " + std::to_string(line_no_) + ": " + msg);
  }

private:
  std::istream& is_;
  int line_no_ = 0;
};

}  // namespace

void write_problem(std::ostream& os, const ConicProblem& p) {
  os << "CONIC 1\n";
  os << "VAR " << p.num_vars() << "\n";
  os << "CON " << p.num_rows() << "\n";
  os << "CONES " << p.cones.size() << "\n";
  for (const Cone& c : p.cones) os << cone_tag(c.kind) << ' ' << c.dim << "\n";
  os << std::setprecision(17);
  os << "OBJ " << (p.c.array() != 0.0).count() << "\n";
  for (Index j = 0; j < p.c.size(); ++j)
    if (p.c(j) != 0.0) os << j << ' ' << p.c(j) << "\n";
  os << "A " << (p.A.array() != 0.0).count() << "\n";
  for (Index i = 0; i < p.A.rows(); ++i)
    for (Index j = 0; j < p.A.cols(); ++j)
      if (p.A(i, j) != 0.0) os << i << ' ' << j << ' ' << p.A(i, j) << "\n";
  os << "B " << (p.b.array() != 0.0).count() << "\n";
  for (Index i = 0; i < p.b.size(); ++i)
    if (p.b(i) != 0.0) os << i << ' ' << p.b(i) << "\n";
}

ConicProblem read_problem(std::istream& is) {
  Reader r(is);
  if (r.keyword("CONIC") != 1) r.fail("unsupported version");
  const long n = r.keyword("VAR");
  const long m = r.keyword("CON");
  const long ncones = r.keyword("CONES");
  ConicProblem p;
  p.c = Vector::Zero(n);
  p.A = Matrix::Zero(m, n);
  p.b = Vector::Zero(m);
  for (long k = 0; k < ncones; ++k) {
    auto ls = r.next_line("cone");
    char tag = 0;
    long dim = 0;
    if (!(ls >> tag >> dim) || dim < 1) r.fail("malformed cone line");
    switch (tag) {
      case 'Z': p.cones.push_back(Cone::zero(dim)); break;
      case 'L': p.cones.push_back(Cone::nonneg(dim)); break;
      case 'Q': p.cones.push_back(Cone::soc(dim)); break;
      case 'S': p.cones.push_back(Cone::psd(dim)); break;
      default: r.fail(std::string("unknown cone tag '") + tag + "'");
    }
  }
  const long nc = r.keyword("OBJ");
  for (long k = 0; k < nc; ++k) {
    auto ls = r.next_line("objective entry");
    long j;
    double v;
    if (!(ls >> j >> v) || j < 0 || j >= n) r.fail("bad objective entry");
    p.c(j) = v;
  }
  const long na = r.keyword("A");
  for (long k = 0; k < na; ++k) {
    auto ls = r.next_line("A entry");
    long i, j;
    double v;
    if (!(ls >> i >> j >> v) || i < 0 || i >= m || j < 0 || j >= n) r.fail("bad A entry");
    p.A(i, j) = v;
  }
  const long nb = r.keyword("B");
  for (long k = 0; k < nb; ++k) {
    auto ls = r.next_line("b entry");
    long i;
    double v;
    if (!(ls >> i >> v) || i < 0 || i >= m) r.fail("bad b entry");
    p.b(i) = v;
  }
  const auto issues = validate(p);
  if (!issues.empty()) r.fail(issues.front().field + ": " + issues.front().message);
  return p;
}

void save_problem(const std::string& path, const ConicProblem& problem) {
  std::ofstream os(path);
  if (!os) throw InvalidInput("cannot open '" + path + "' for writing");
  write_problem(os, problem);
}

ConicProblem load_problem(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw InvalidInput("cannot open '" + path + "'");
  return read_problem(is);
}

}  // namespace rab::conic
