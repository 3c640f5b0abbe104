#include "tpnsi/bigraded_complex.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <utility>

#include "tpnsi/errors.hpp"
#include "tpnsi/parallel.hpp"

namespace tpnsi {

namespace {

/// Sorts the word into strictly increasing order; returns the transposition
/// parity (+1/−1), or 0 when an index repeats (the monomial vanishes).
int sort_with_parity(std::vector<int>& word) {
  int sign = 1;
  for (std::size_t i = 1; i < word.size(); ++i) {
    std::size_t j = i;
    while (j > 0 && word[j] < word[j - 1]) {
      std::swap(word[j], word[j - 1]);
      sign = -sign;
      --j;
    }
  }
  for (std::size_t i = 1; i < word.size(); ++i) {
    if (word[i] == word[i - 1]) return 0;
  }
  return sign;
}

std::vector<std::vector<int>> subsets_lex(int dim, int k) {
  std::vector<std::vector<int>> out;
  if (k == 0) {
    out.push_back({});
    return out;
  }
  if (k > dim) return out;
  std::vector<int> idx(static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i) idx[static_cast<std::size_t>(i)] = i;
  while (true) {
    out.push_back(idx);
    // Advance to the next combination in lexicographic order.
    int pos = k - 1;
    while (pos >= 0 &&
           idx[static_cast<std::size_t>(pos)] == dim - k + pos) {
      --pos;
    }
    if (pos < 0) break;
    ++idx[static_cast<std::size_t>(pos)];
    for (int i = pos + 1; i < k; ++i) {
      idx[static_cast<std::size_t>(i)] = idx[static_cast<std::size_t>(i - 1)] + 1;
    }
  }
  return out;
}

Rational rational_pow(const Rational& base, int exponent) {
  Rational result = 1;
  if (exponent >= 0) {
    for (int i = 0; i < exponent; ++i) result *= base;
  } else {
    for (int i = 0; i < -exponent; ++i) result /= base;
  }
  return result;
}

std::string trim_ws(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

Rational parse_rational(const std::string& tok, std::size_t line_no) {
  try {
    return Rational(tok);
  } catch (const std::exception&) {
    throw std::invalid_argument("parse_presentation: line " +
                                std::to_string(line_no) +
                                ": bad rational '" + tok + "'");
  }
}

}  // namespace

const Rational& LieAlgebraPresentation::structure_constant(int i, int j,
                                                           int k) const {
  return structure_constants[static_cast<std::size_t>((i * dim + j) * dim + k)];
}

void LieAlgebraPresentation::set_structure_constant(int i, int j, int k,
                                                    const Rational& value) {
  if (i == j && value != 0) {
    throw std::invalid_argument(
        "LieAlgebraPresentation: [e_i, e_i] must vanish");
  }
  structure_constants[static_cast<std::size_t>((i * dim + j) * dim + k)] =
      value;
  structure_constants[static_cast<std::size_t>((j * dim + i) * dim + k)] =
      -value;
}

std::vector<int> LieAlgebraPresentation::horizontal() const {
  std::vector<int> out;
  for (int i = 0; i < dim; ++i) {
    if (!is_vertical(i)) out.push_back(i);
  }
  return out;
}

bool LieAlgebraPresentation::is_vertical(int index) const {
  return std::binary_search(vertical.begin(), vertical.end(), index);
}

void LieAlgebraPresentation::validate() const {
  if (dim < 1) {
    throw std::invalid_argument("LieAlgebraPresentation: dim must be >= 1");
  }
  const std::size_t expected =
      static_cast<std::size_t>(dim) * static_cast<std::size_t>(dim) *
      static_cast<std::size_t>(dim);
  if (structure_constants.size() != expected) {
    throw std::invalid_argument(
        "LieAlgebraPresentation: structure constant table has wrong size");
  }
  if (!std::is_sorted(vertical.begin(), vertical.end()) ||
      std::adjacent_find(vertical.begin(), vertical.end()) != vertical.end()) {
    throw std::invalid_argument(
        "LieAlgebraPresentation: vertical indices must be sorted and unique");
  }
  for (int v : vertical) {
    if (v < 0 || v >= dim) {
      throw std::invalid_argument(
          "LieAlgebraPresentation: vertical index out of range");
    }
  }
  for (int i = 0; i < dim; ++i) {
    for (int j = 0; j < dim; ++j) {
      for (int k = 0; k < dim; ++k) {
        if (structure_constant(i, j, k) != -structure_constant(j, i, k)) {
          throw std::invalid_argument(
              "LieAlgebraPresentation: structure constants are not "
              "antisymmetric in (i, j)");
        }
      }
    }
  }
  // Jacobi: [[e_i,e_j],e_l] + [[e_j,e_l],e_i] + [[e_l,e_i],e_j] = 0.
  for (int i = 0; i < dim; ++i) {
    for (int j = i + 1; j < dim; ++j) {
      for (int l = j + 1; l < dim; ++l) {
        for (int m = 0; m < dim; ++m) {
          Rational total = 0;
          for (int k = 0; k < dim; ++k) {
            total += structure_constant(i, j, k) * structure_constant(k, l, m);
            total += structure_constant(j, l, k) * structure_constant(k, i, m);
            total += structure_constant(l, i, k) * structure_constant(k, j, m);
          }
          if (total != 0) {
            std::ostringstream os;
            os << "LieAlgebraPresentation: Jacobi identity fails at basis "
                  "triple ("
               << i + 1 << ", " << j + 1 << ", " << l + 1 << ") [1-based]";
            throw invalid_presentation_error(os.str());
          }
        }
      }
    }
  }
}

bool LieAlgebraPresentation::vertical_is_subalgebra() const {
  for (int i : vertical) {
    for (int j : vertical) {
      for (int k = 0; k < dim; ++k) {
        if (!is_vertical(k) && structure_constant(i, j, k) != 0) return false;
      }
    }
  }
  return true;
}

std::size_t BigradedBasis::index_of(const std::vector<int>& sorted_word) const {
  const std::size_t k = sorted_word.size();
  if (k >= by_degree.size()) {
    throw std::invalid_argument("BigradedBasis: word degree out of range");
  }
  const auto& level = by_degree[k];
  auto it = std::lower_bound(
      level.begin(), level.end(), sorted_word,
      [](const BasisMonomial& m, const std::vector<int>& w) {
        return m.word < w;
      });
  if (it == level.end() || it->word != sorted_word) {
    throw std::invalid_argument("BigradedBasis: not a basis word");
  }
  return static_cast<std::size_t>(it - level.begin());
}

BigradedBasis build_basis(const LieAlgebraPresentation& lie) {
  BigradedBasis basis;
  basis.dim = lie.dim;
  basis.vertical = lie.vertical;
  basis.by_degree.resize(static_cast<std::size_t>(lie.dim) + 1);
  for (int k = 0; k <= lie.dim; ++k) {
    for (auto& word : subsets_lex(lie.dim, k)) {
      BasisMonomial mono;
      mono.word = std::move(word);
      for (int idx : mono.word) {
        if (lie.is_vertical(idx)) {
          ++mono.q;
        } else {
          ++mono.p;
        }
      }
      basis.by_degree[static_cast<std::size_t>(k)].push_back(std::move(mono));
    }
  }
  return basis;
}

const RationalMatrix& CEComplex::differential(int k) const {
  if (k < 0 || static_cast<std::size_t>(k) >= d.size()) {
    throw std::invalid_argument("CEComplex: differential degree out of range");
  }
  return d[static_cast<std::size_t>(k)];
}

CEComplex build_ce_complex(const LieAlgebraPresentation& lie) {
  lie.validate();
  CEComplex complex;
  complex.lie = lie;
  complex.basis = build_basis(lie);
  const int dim = lie.dim;
  complex.d.resize(static_cast<std::size_t>(dim));

  parallel_for(static_cast<std::size_t>(dim), [&](std::size_t uk) {
    const auto& sources = complex.basis.by_degree[uk];
    const auto& targets = complex.basis.by_degree[uk + 1];
    RationalMatrix dk(targets.size(), sources.size());
    for (std::size_t s = 0; s < sources.size(); ++s) {
      const std::vector<int>& word = sources[s].word;
      for (std::size_t a = 0; a < word.size(); ++a) {
        const int generator = word[a];
        // Antiderivation sign for passing a factors, times the structure
        // term of d xi^generator = −Σ_{i<j} c_{ij}^generator xi^i ∧ xi^j.
        const int outer_sign = (a % 2 == 0) ? 1 : -1;
        for (int i = 0; i < dim; ++i) {
          for (int j = i + 1; j < dim; ++j) {
            const Rational& c = lie.structure_constant(i, j, generator);
            if (c == 0) continue;
            std::vector<int> target_word;
            target_word.reserve(word.size() + 1);
            target_word.insert(target_word.end(), word.begin(),
                               word.begin() + static_cast<std::ptrdiff_t>(a));
            target_word.push_back(i);
            target_word.push_back(j);
            target_word.insert(
                target_word.end(),
                word.begin() + static_cast<std::ptrdiff_t>(a) + 1, word.end());
            const int parity = sort_with_parity(target_word);
            if (parity == 0) continue;
            const std::size_t t = complex.basis.index_of(target_word);
            dk(t, s) += Rational(outer_sign * parity) * -c;
          }
        }
      }
    }
    complex.d[uk] = std::move(dk);
  });

  for (int k = 0; k + 1 < dim; ++k) {
    if (!(complex.d[static_cast<std::size_t>(k) + 1] *
          complex.d[static_cast<std::size_t>(k)])
             .is_zero()) {
      throw std::logic_error(
          "build_ce_complex: d∘d != 0 despite a valid Jacobi identity");
    }
  }
  return complex;
}

namespace {

DifferentialSplit split_impl(const CEComplex& complex) {
  const int dim = complex.lie.dim;
  DifferentialSplit split;
  split.D01.resize(static_cast<std::size_t>(dim));
  split.D10.resize(static_cast<std::size_t>(dim));
  split.D2m1.resize(static_cast<std::size_t>(dim));
  split.residual.resize(static_cast<std::size_t>(dim));
  for (std::size_t k = 0; k < static_cast<std::size_t>(dim); ++k) {
    const auto& sources = complex.basis.by_degree[k];
    const auto& targets = complex.basis.by_degree[k + 1];
    const RationalMatrix& dk = complex.d[k];
    RationalMatrix d01(targets.size(), sources.size());
    RationalMatrix d10(targets.size(), sources.size());
    RationalMatrix d2m1(targets.size(), sources.size());
    RationalMatrix rest(targets.size(), sources.size());
    for (std::size_t t = 0; t < targets.size(); ++t) {
      for (std::size_t s = 0; s < sources.size(); ++s) {
        const Rational& v = dk(t, s);
        if (v == 0) continue;
        const int dp = targets[t].p - sources[s].p;
        const int dq = targets[t].q - sources[s].q;
        if (dp == 0 && dq == 1) {
          d01(t, s) = v;
        } else if (dp == 1 && dq == 0) {
          d10(t, s) = v;
        } else if (dp == 2 && dq == -1) {
          d2m1(t, s) = v;
        } else {
          rest(t, s) = v;
        }
      }
    }
    split.D01[k] = std::move(d01);
    split.D10[k] = std::move(d10);
    split.D2m1[k] = std::move(d2m1);
    split.residual[k] = std::move(rest);
  }
  return split;
}

}  // namespace

bool DifferentialSplit::residual_is_zero() const {
  return std::all_of(residual.begin(), residual.end(),
                     [](const RationalMatrix& m) { return m.is_zero(); });
}

DifferentialSplit split_differential(const CEComplex& complex) {
  DifferentialSplit split = split_impl(complex);
  if (!split.residual_is_zero()) {
    std::ostringstream os;
    os << "split_differential: the differential has components outside the "
          "(0,1), (1,0), (2,-1) shifts (vertical is not a subalgebra); "
          "offending entries:";
    for (std::size_t k = 0; k < split.residual.size(); ++k) {
      const RationalMatrix& r = split.residual[k];
      for (std::size_t t = 0; t < r.rows(); ++t) {
        for (std::size_t s = 0; s < r.cols(); ++s) {
          if (r(t, s) != 0) {
            os << " degree " << k << " entry (" << t << ", " << s << ") = "
               << r(t, s) << ";";
          }
        }
      }
    }
    throw invalid_presentation_error(os.str());
  }
  return split;
}

DifferentialSplit split_differential_lenient(const CEComplex& complex) {
  return split_impl(complex);
}

bool IdentityResiduals::all_zero() const {
  for (const auto& family : composites) {
    for (const RationalMatrix& m : family) {
      if (!m.is_zero()) return false;
    }
  }
  return true;
}

IdentityResiduals verify_identities(const DifferentialSplit& split) {
  IdentityResiduals out;
  const std::size_t levels = split.D01.size();
  if (levels < 2) return out;
  for (std::size_t k = 0; k + 1 < levels; ++k) {
    const RationalMatrix& a01 = split.D01[k];
    const RationalMatrix& a10 = split.D10[k];
    const RationalMatrix& a2m1 = split.D2m1[k];
    const RationalMatrix& b01 = split.D01[k + 1];
    const RationalMatrix& b10 = split.D10[k + 1];
    const RationalMatrix& b2m1 = split.D2m1[k + 1];
    out.composites[0].push_back(b01 * a01);
    out.composites[1].push_back(b01 * a10 + b10 * a01);
    out.composites[2].push_back(b01 * a2m1 + b10 * a10 + b2m1 * a01);
    out.composites[3].push_back(b10 * a2m1 + b2m1 * a10);
    out.composites[4].push_back(b2m1 * a2m1);
  }
  return out;
}

ScaledGram scaled_gram(const BigradedBasis& basis, const Rational& mu,
                       const Rational& nu) {
  if (mu <= 0 || nu <= 0) {
    throw std::invalid_argument("scaled_gram: mu and nu must be positive");
  }
  return scaled_gram_from_squares(basis, mu * mu, nu * nu);
}

ScaledGram scaled_gram_from_squares(const BigradedBasis& basis,
                                    const Rational& mu2, const Rational& nu2) {
  if (mu2 <= 0 || nu2 <= 0) {
    throw std::invalid_argument(
        "scaled_gram_from_squares: squared scales must be positive");
  }
  ScaledGram gram;
  gram.mu2 = mu2;
  gram.nu2 = nu2;
  gram.weights.resize(basis.by_degree.size());
  for (std::size_t k = 0; k < basis.by_degree.size(); ++k) {
    gram.weights[k].reserve(basis.by_degree[k].size());
    for (const BasisMonomial& mono : basis.by_degree[k]) {
      gram.weights[k].push_back(rational_pow(mu2, -mono.p) *
                                rational_pow(nu2, -mono.q));
    }
  }
  return gram;
}

Rational norm_of(const std::vector<Rational>& form_coeffs, int degree,
                 const ScaledGram& gram) {
  if (degree < 0 || static_cast<std::size_t>(degree) >= gram.weights.size()) {
    throw std::invalid_argument("norm_of: degree out of range");
  }
  const auto& w = gram.weights[static_cast<std::size_t>(degree)];
  if (form_coeffs.size() != w.size()) {
    throw std::invalid_argument(
        "norm_of: coefficient count does not match the degree's basis size");
  }
  Rational total = 0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    total += form_coeffs[i] * form_coeffs[i] * w[i];
  }
  return total;
}

RationalMatrix up_laplacian(const CEComplex& complex, int k,
                            const ScaledGram& gram) {
  const int dim = complex.lie.dim;
  if (k < 0 || k > dim) {
    throw std::invalid_argument("up_laplacian: degree out of range");
  }
  const std::size_t nk = complex.basis.by_degree[static_cast<std::size_t>(k)].size();
  if (k == dim) return RationalMatrix(nk, nk);

  const RationalMatrix& dk = complex.differential(k);
  const auto& wk = gram.weights[static_cast<std::size_t>(k)];
  const auto& wk1 = gram.weights[static_cast<std::size_t>(k) + 1];
  // G_k^{-1} d^T G_{k+1} d with diagonal Gram factors applied in place.
  RationalMatrix scaled_d(dk.rows(), dk.cols());
  for (std::size_t t = 0; t < dk.rows(); ++t) {
    for (std::size_t s = 0; s < dk.cols(); ++s) {
      if (dk(t, s) != 0) scaled_d(t, s) = wk1[t] * dk(t, s);
    }
  }
  RationalMatrix result = dk.transpose() * scaled_d;
  for (std::size_t i = 0; i < result.rows(); ++i) {
    for (std::size_t j = 0; j < result.cols(); ++j) {
      if (result(i, j) != 0) result(i, j) /= wk[i];
    }
  }
  return result;
}

LieAlgebraPresentation parse_presentation(const std::string& text) {
  LieAlgebraPresentation lie;
  bool saw_dim = false;
  struct Bracket {
    int i, j, k;
    Rational value;
  };
  std::vector<Bracket> brackets;
  std::vector<int> vertical;

  std::istringstream in(text);
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string line = raw;
    if (auto hash = line.find('#'); hash != std::string::npos) {
      line = line.substr(0, hash);
    }
    line = trim_ws(line);
    if (line.empty()) continue;

    auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw std::invalid_argument("parse_presentation: line " +
                                  std::to_string(line_no) +
                                  ": expected 'key = value'");
    }
    const std::string key = trim_ws(line.substr(0, eq));
    const std::string value = trim_ws(line.substr(eq + 1));

    std::istringstream keys(key);
    std::string head;
    keys >> head;
    if (head == "dim") {
      if (saw_dim) {
        throw std::invalid_argument("parse_presentation: line " +
                                    std::to_string(line_no) +
                                    ": duplicate dim");
      }
      lie.dim = static_cast<int>(parse_rational(value, line_no));
      saw_dim = true;
    } else if (head == "vertical") {
      std::istringstream vs(value);
      std::string tok;
      while (std::getline(vs, tok, ',')) {
        tok = trim_ws(tok);
        if (tok.empty()) continue;
        vertical.push_back(static_cast<int>(parse_rational(tok, line_no)) - 1);
      }
    } else if (head == "bracket") {
      Bracket b;
      if (!(keys >> b.i >> b.j >> b.k)) {
        throw std::invalid_argument("parse_presentation: line " +
                                    std::to_string(line_no) +
                                    ": expected 'bracket i j k = value'");
      }
      b.value = parse_rational(value, line_no);
      brackets.push_back(std::move(b));
    } else {
      throw std::invalid_argument("parse_presentation: line " +
                                  std::to_string(line_no) +
                                  ": unknown key '" + head + "'");
    }
  }

  if (!saw_dim || lie.dim < 1) {
    throw std::invalid_argument(
        "parse_presentation: missing or invalid 'dim' line");
  }
  lie.structure_constants.assign(static_cast<std::size_t>(lie.dim) *
                                     static_cast<std::size_t>(lie.dim) *
                                     static_cast<std::size_t>(lie.dim),
                                 Rational(0));
  std::sort(vertical.begin(), vertical.end());
  lie.vertical = std::move(vertical);
  for (const auto& b : brackets) {
    if (b.i < 1 || b.i > lie.dim || b.j < 1 || b.j > lie.dim || b.k < 1 ||
        b.k > lie.dim) {
      throw std::invalid_argument(
          "parse_presentation: bracket index out of range (1.." +
          std::to_string(lie.dim) + ")");
    }
    lie.set_structure_constant(b.i - 1, b.j - 1, b.k - 1, b.value);
  }
  lie.validate();
  return lie;
}

std::string serialize_presentation(const LieAlgebraPresentation& lie) {
  std::ostringstream os;
  os << "dim = " << lie.dim << "\n";
  if (!lie.vertical.empty()) {
    os << "vertical = ";
    for (std::size_t i = 0; i < lie.vertical.size(); ++i) {
      if (i) os << ",";
      os << lie.vertical[i] + 1;
    }
    os << "\n";
  }
  for (int i = 0; i < lie.dim; ++i) {
    for (int j = i + 1; j < lie.dim; ++j) {
      for (int k = 0; k < lie.dim; ++k) {
        const Rational& c = lie.structure_constant(i, j, k);
        if (c != 0) {
          os << "bracket " << i + 1 << " " << j + 1 << " " << k + 1 << " = "
             << c << "\n";
        }
      }
    }
  }
  return os.str();
}

LieAlgebraPresentation load_presentation_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("load_presentation_file: cannot read " + path);
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_presentation(buf.str());
}

LieAlgebraPresentation abelian_presentation(int n) {
  if (n < 1) {
    throw std::invalid_argument("abelian_presentation: n must be >= 1");
  }
  LieAlgebraPresentation lie;
  lie.dim = n;
  lie.structure_constants.assign(static_cast<std::size_t>(n) *
                                     static_cast<std::size_t>(n) *
                                     static_cast<std::size_t>(n),
                                 Rational(0));
  lie.vertical = {n - 1};
  return lie;
}

LieAlgebraPresentation h3_presentation() {
  LieAlgebraPresentation lie = abelian_presentation(3);
  lie.set_structure_constant(0, 1, 2, 1);
  return lie;
}

LieAlgebraPresentation h5_presentation() {
  LieAlgebraPresentation lie = abelian_presentation(5);
  lie.set_structure_constant(0, 2, 4, 1);
  lie.set_structure_constant(1, 3, 4, 1);
  return lie;
}

LieAlgebraPresentation solvable3_presentation() {
  LieAlgebraPresentation lie = abelian_presentation(3);
  lie.set_structure_constant(0, 2, 2, 1);
  return lie;
}

}  // namespace tpnsi
