#include "osc/diff_op.hpp"

#include <sstream>

namespace osc {

int h_weight(const MultiIndex& a, const std::vector<int>& orders) {
  int w = 0;
  for (size_t j = 0; j < a.size(); ++j) w += a[j] * orders[j];
  return w;
}

namespace {

void check_same_patch(const PatchRef& a, const PatchRef& b) {
  if (a.get() != b.get())
    throw DomainError("operands live on different patches");
}

std::vector<int> to_letters(const MultiIndex& a) {
  std::vector<int> letters;
  for (size_t j = 0; j < a.size(); ++j)
    for (int r = 0; r < a[j]; ++r) letters.push_back(static_cast<int>(j));
  return letters;
}

MultiIndex from_letters(const std::vector<int>& letters, int dim) {
  MultiIndex a(dim, 0);
  for (int l : letters) a[l] += 1;
  return a;
}

// Term-map algebra shared by the enveloping product and the graded
// (cosymbol) product.  graded = true restricts brackets to the
// grading-compatible part and freezes coefficients (no derivative terms).
struct Engine {
  const FilteredPatch& patch;
  bool graded;

  using Terms = std::map<MultiIndex, Expr>;

  void add(Terms& acc, const MultiIndex& a, const Expr& c) const {
    if (c.is_zero()) return;
    auto it = acc.find(a);
    if (it == acc.end()) {
      acc.emplace(a, c);
    } else {
      it->second += c;
      if (it->second.is_zero()) acc.erase(it);
    }
  }

  void add_all(Terms& acc, const Terms& other, const Expr* scale) const {
    for (const auto& [a, c] : other)
      add(acc, a, scale ? (*scale) * c : c);
  }

  // X_k . X^a at the level of letters only; bracket insertions produce
  // coefficient functions on the left of shorter words.
  Terms word_leftmul(int k, const std::vector<int>& letters) const {
    Terms out;
    if (letters.empty() || k <= letters.front()) {
      std::vector<int> w;
      w.reserve(letters.size() + 1);
      w.push_back(k);
      w.insert(w.end(), letters.begin(), letters.end());
      add(out, from_letters(w, patch.dim()), Expr::constant(patch.dim(), 1));
      return out;
    }
    int j = letters.front();
    std::vector<int> rest(letters.begin() + 1, letters.end());
    // X_k X_j w' = X_j (X_k w') + [X_k, X_j] w'
    Terms inner = word_leftmul(k, rest);
    Terms first = leftmul_letter(j, inner);
    add_all(out, first, nullptr);
    for (int m = 0; m < patch.dim(); ++m) {
      if (graded &&
          patch.orders()[m] != patch.orders()[k] + patch.orders()[j])
        continue;
      const Expr& f = patch.bracket_coeff(k, j, m);
      if (f.is_zero()) continue;
      Terms sub = word_leftmul(m, rest);
      add_all(out, sub, &f);
    }
    return out;
  }

  Terms leftmul_letter(int k, const Terms& B) const {
    Terms out;
    for (const auto& [a, g] : B) {
      if (!graded) {
        Expr dg = patch.frame()[k].apply(g);
        add(out, a, dg);
      }
      Terms words = word_leftmul(k, to_letters(a));
      add_all(out, words, &g);
    }
    return out;
  }

  Terms multiply(const Terms& A, const Terms& B) const {
    Terms out;
    for (const auto& [a, c] : A) {
      Terms acc = B;
      auto letters = to_letters(a);
      for (auto it = letters.rbegin(); it != letters.rend(); ++it)
        acc = leftmul_letter(*it, acc);
      add_all(out, acc, &c);
    }
    return out;
  }
};

std::string terms_to_string(const std::map<MultiIndex, Expr>& terms,
                            const char* letter) {
  if (terms.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  for (const auto& [a, c] : terms) {
    if (!first) os << " + ";
    first = false;
    os << "[" << c.to_string() << "]";
    for (size_t j = 0; j < a.size(); ++j)
      if (a[j] > 0) os << "*" << letter << j + 1 << "^" << a[j];
  }
  return os.str();
}

}  // namespace

FilteredDiffOp FilteredDiffOp::identity(PatchRef patch) {
  FilteredDiffOp op(patch);
  op.add_term(MultiIndex(patch->dim(), 0), Expr::constant(patch->dim(), 1));
  return op;
}

FilteredDiffOp FilteredDiffOp::generator(PatchRef patch, int k) {
  FilteredDiffOp op(patch);
  MultiIndex a(patch->dim(), 0);
  a[k] = 1;
  op.add_term(a, Expr::constant(patch->dim(), 1));
  return op;
}

void FilteredDiffOp::add_term(const MultiIndex& a, const Expr& coeff) {
  if (static_cast<int>(a.size()) != patch_->dim())
    throw MalformedInput("multi-index length != patch dimension");
  if (coeff.is_zero()) return;
  auto it = terms_.find(a);
  if (it == terms_.end()) {
    terms_.emplace(a, coeff);
  } else {
    it->second += coeff;
    if (it->second.is_zero()) terms_.erase(it);
  }
}

int FilteredDiffOp::h_order() const {
  int m = 0;
  for (const auto& [a, c] : terms_)
    m = std::max(m, h_weight(a, patch_->orders()));
  return m;
}

Expr FilteredDiffOp::apply(const Expr& f) const {
  Expr out(patch_->dim());
  for (const auto& [a, c] : terms_) {
    Expr g = f;
    auto letters = to_letters(a);
    for (auto it = letters.rbegin(); it != letters.rend(); ++it)
      g = patch_->frame()[*it].apply(g);
    out += c * g;
  }
  return out;
}

FilteredDiffOp FilteredDiffOp::operator+(const FilteredDiffOp& o) const {
  check_same_patch(patch_, o.patch_);
  FilteredDiffOp out = *this;
  for (const auto& [a, c] : o.terms_) out.add_term(a, c);
  return out;
}

FilteredDiffOp FilteredDiffOp::operator-(const FilteredDiffOp& o) const {
  check_same_patch(patch_, o.patch_);
  FilteredDiffOp out = *this;
  for (const auto& [a, c] : o.terms_) out.add_term(a, -c);
  return out;
}

std::string FilteredDiffOp::to_string() const {
  return terms_to_string(terms_, "X");
}

FilteredDiffOp compose(const FilteredDiffOp& A, const FilteredDiffOp& B) {
  check_same_patch(A.patch(), B.patch());
  Engine engine{*A.patch(), /*graded=*/false};
  auto product = engine.multiply(A.terms(), B.terms());
  FilteredDiffOp out(A.patch());
  for (const auto& [a, c] : product) out.add_term(a, c);
  return out;
}

void Cosymbol::add_term(const MultiIndex& a, const Expr& coeff) {
  if (coeff.is_zero()) return;
  if (h_weight(a, patch_->orders()) != weight_)
    throw MalformedInput("cosymbol term weight != declared weight");
  auto it = terms_.find(a);
  if (it == terms_.end()) {
    terms_.emplace(a, coeff);
  } else {
    it->second += coeff;
    if (it->second.is_zero()) terms_.erase(it);
  }
}

bool Cosymbol::operator==(const Cosymbol& o) const {
  if (patch_.get() != o.patch_.get()) return false;
  if (terms_.size() != o.terms_.size()) return false;
  for (const auto& [a, c] : terms_) {
    auto it = o.terms_.find(a);
    if (it == o.terms_.end() || !(c == it->second)) return false;
  }
  return true;
}

std::string Cosymbol::to_string() const {
  return terms_to_string(terms_, "Xbar");
}

Cosymbol principal_cosymbol(const FilteredDiffOp& A) {
  if (A.is_zero())
    throw DomainError(
        "principal cosymbol of the zero operator has undefined weight");
  int m = A.h_order();
  Cosymbol out(A.patch(), m);
  for (const auto& [a, c] : A.terms())
    if (h_weight(a, A.patch()->orders()) == m) out.add_term(a, c);
  return out;
}

Cosymbol cosymbol_compose(const Cosymbol& u, const Cosymbol& v) {
  check_same_patch(u.patch(), v.patch());
  Engine engine{*u.patch(), /*graded=*/true};
  auto product = engine.multiply(u.terms(), v.terms());
  Cosymbol out(u.patch(), u.weight() + v.weight());
  for (const auto& [a, c] : product) out.add_term(a, c);
  return out;
}

SymbolicKernelFamily kernel_family(const FilteredDiffOp& A) {
  SymbolicKernelFamily F;
  F.patch = A.patch();
  F.weight = A.h_order();
  for (const auto& [a, c] : A.terms())
    F.terms.push_back(
        {c, a, F.weight - h_weight(a, A.patch()->orders())});
  return F;
}

bool is_homogeneous_on_nose(const SymbolicKernelFamily& F, int m) {
  if (F.has_smooth_term) return false;
  for (const auto& term : F.terms) {
    if (term.t_power < 0) return false;
    if (term.t_power + h_weight(term.index, F.patch->orders()) != m)
      return false;
  }
  return true;
}

FilteredDiffOp restrict_family(const SymbolicKernelFamily& F,
                               const Rational& t) {
  FilteredDiffOp out(F.patch);
  for (const auto& term : F.terms) {
    Rational p(1);
    for (int i = 0; i < term.t_power; ++i) p *= t;
    out.add_term(term.index, term.coeff.scaled(p));
  }
  return out;
}

std::string SymbolicKernelFamily::to_string() const {
  if (terms.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  for (const auto& term : terms) {
    if (!first) os << " + ";
    first = false;
    os << "t^" << term.t_power << "*[" << term.coeff.to_string()
       << "]*delta^(";
    for (size_t j = 0; j < term.index.size(); ++j) {
      if (j) os << ",";
      os << term.index[j];
    }
    os << ")(-xi)";
  }
  return os.str();
}

}  // namespace osc
