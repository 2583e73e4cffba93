#include "fpdyn/game.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "fpdyn/errors.hpp"

namespace fpdyn {

double golden_mean() { return (std::sqrt(5.0) - 1.0) / 2.0; }

namespace {

// 0 for a nonsingular M. A singular M is still accepted when p -> M p stays
// injective on the simplex, i.e. M + cJ is nonsingular for c != 0 (the Shapley
// B at beta = 1 has zero row sums).
double simplex_shift(const Matrix& m, const char* name) {
  if (is_nonsingular(m)) return 0.0;
  const double c = std::max(1.0, m.max_abs());
  if (is_nonsingular(m + Matrix(m.rows(), m.cols(), c))) return c;
  throw StructuralError(std::string("payoff matrix ") + name + " is singular on the simplex");
}

}  // namespace

BimatrixGame::BimatrixGame(Matrix a, Matrix b, std::optional<double> beta)
    : a_(std::move(a)), b_(std::move(b)), beta_(beta) {
  if (!a_.square() || !b_.square() || a_.rows() != b_.rows())
    throw StructuralError("payoff matrices must be square and of equal size");
  if (a_.rows() < 2) throw StructuralError("games need at least two strategies");
  a_shift_ = simplex_shift(a_, "A");
  b_shift_ = simplex_shift(b_, "B");
  const Matrix ones(n(), n(), 1.0);
  a_inv_ = inverse(a_ + ones * a_shift_);
  b_inv_ = inverse(b_ + ones * b_shift_);
}

BimatrixGame make_shapley(double beta) {
  if (!(beta > -1.0 && beta <= 1.0))
    throw ParameterError("beta must lie in (-1, 1], got " + std::to_string(beta));
  Matrix a{{1.0, 0.0, beta}, {beta, 1.0, 0.0}, {0.0, beta, 1.0}};
  Matrix b{{-beta, 1.0, 0.0}, {0.0, -beta, 1.0}, {1.0, 0.0, -beta}};
  return BimatrixGame(std::move(a), std::move(b), beta);
}

SimplexPoint::SimplexPoint(Vec components) : x_(std::move(components)) {
  if (x_.empty()) throw StructuralError("empty simplex point");
  double s = 0.0;
  for (double& c : x_) {
    if (!std::isfinite(c) || c < -1e-12) throw DomainError("simplex component below zero", x_);
    c = std::max(c, 0.0);
    s += c;
  }
  if (std::abs(s - 1.0) > 1e-10) throw DomainError("simplex components do not sum to 1", x_);
  for (double& c : x_) c /= s;
}

SimplexPoint vertex(std::size_t n, std::size_t i) {
  Vec x(n, 0.0);
  x.at(i) = 1.0;
  return SimplexPoint(std::move(x));
}

SimplexPoint barycenter(std::size_t n) { return SimplexPoint(Vec(n, 1.0 / static_cast<double>(n))); }

bool BestResponseSet::contains(int i) const {
  return std::find(indices.begin(), indices.end(), i) != indices.end();
}

StateV utilities(const BimatrixGame& game, const StateP& state) {
  if (state.pA.size() != game.n() || state.pB.size() != game.n())
    throw StructuralError("state dimension does not match the game");
  return {game.a() * state.pB.components(), row_times(state.pA.components(), game.b())};
}

BestResponseSet best_response_set(const Vec& v, double tol, Player player) {
  if (tol < 0) throw ParameterError("tie tolerance must be non-negative");
  if (v.empty()) throw StructuralError("empty utility vector");
  BestResponseSet br;
  br.player = player;
  const double top = *std::max_element(v.begin(), v.end());
  double second = -std::numeric_limits<double>::infinity();
  bool seen_top = false;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (v[i] >= top - tol) br.indices.push_back(static_cast<int>(i));
    if (v[i] == top && !seen_top) {
      seen_top = true;
    } else {
      second = std::max(second, v[i]);
    }
  }
  br.margin = br.indices.size() > 1 ? 0.0 : top - second;
  return br;
}

StateP interior_equilibrium(const BimatrixGame& game) {
  const std::size_t n = game.n();
  const Vec ones(n, 1.0);
  const Vec eb = game.a_inverse() * ones;          // A eB = c 1
  const Vec ea = row_times(ones, game.b_inverse());  // eA B = c 1
  const double sb = sum(eb), sa = sum(ea);
  if (sa == 0.0 || sb == 0.0) throw DomainError("no interior equilibrium: degenerate normalization", ea);
  Vec pa(n), pb(n);
  for (std::size_t i = 0; i < n; ++i) {
    pa[i] = ea[i] / sa;
    pb[i] = eb[i] / sb;
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (pa[i] <= 0.0) throw DomainError("no interior equilibrium for player A's mixture", ea);
    if (pb[i] <= 0.0) throw DomainError("no interior equilibrium for player B's mixture", eb);
  }
  return {SimplexPoint(pa), SimplexPoint(pb)};
}

TransversalityReport check_transversality(const BimatrixGame& game) {
  TransversalityReport rep;
  const int n = static_cast<int>(game.n());
  for (int line = 0; line < n; ++line)
    for (int i = 0; i < n; ++i)
      for (int k = i + 1; k < n; ++k) {
        if (game.a()(i, line) == game.a()(k, line)) rep.violations.push_back({Player::A, line, i, k});
        if (game.b()(line, i) == game.b()(line, k)) rep.violations.push_back({Player::B, line, i, k});
      }
  rep.ok = rep.violations.empty();
  return rep;
}

double zero_sum_certificate(double beta) {
  const BimatrixGame g = make_shapley(beta);
  const double s = golden_mean();
  double r = 0.0;
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j) r = std::max(r, std::abs(g.a()(i, j) + s * (g.b()(i, j) - 1.0)));
  return r;
}

}  // namespace fpdyn
