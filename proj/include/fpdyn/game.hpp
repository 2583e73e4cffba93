#pragma once

#include <optional>
#include <string>
#include <vector>

#include "fpdyn/linalg.hpp"

namespace fpdyn {

enum class Player { A, B };

inline char player_name(Player p) { return p == Player::A ? 'A' : 'B'; }
inline Player other(Player p) { return p == Player::A ? Player::B : Player::A; }

inline constexpr double kTieTol = 1e-9;

// (sqrt5 - 1) / 2
double golden_mean();

class BimatrixGame {
 public:
  // A is the row player's payoff matrix, B the column player's.
  BimatrixGame(Matrix a, Matrix b, std::optional<double> beta = std::nullopt);

  std::size_t n() const { return a_.rows(); }
  const Matrix& a() const { return a_; }
  const Matrix& b() const { return b_; }
  // Inverses of A + cJ and B + cJ, with c = a_shift() / b_shift() (J all ones);
  // c is 0 unless the matrix itself is singular.
  const Matrix& a_inverse() const { return a_inv_; }
  const Matrix& b_inverse() const { return b_inv_; }
  double a_shift() const { return a_shift_; }
  double b_shift() const { return b_shift_; }
  std::optional<double> beta() const { return beta_; }

 private:
  Matrix a_, b_, a_inv_, b_inv_;
  double a_shift_ = 0.0, b_shift_ = 0.0;
  std::optional<double> beta_;
};

// A = [[1,0,b],[b,1,0],[0,b,1]], B = [[-b,1,0],[0,-b,1],[1,0,-b]], -1 < b <= 1.
BimatrixGame make_shapley(double beta);

class SimplexPoint {
 public:
  // Accepts components >= -1e-12 summing to 1 within 1e-10, then clamps and renormalizes.
  explicit SimplexPoint(Vec components);
  const Vec& components() const { return x_; }
  std::size_t size() const { return x_.size(); }
  double operator[](std::size_t i) const { return x_[i]; }

 private:
  Vec x_;
};

SimplexPoint vertex(std::size_t n, std::size_t i);
SimplexPoint barycenter(std::size_t n);

struct StateP {
  SimplexPoint pA;
  SimplexPoint pB;
};

struct StateV {
  Vec vA;  // A pB
  Vec vB;  // pA B
};

struct BestResponseSet {
  Player player = Player::A;
  std::vector<int> indices;  // 0-based, ascending
  double margin = 0.0;
  bool strict() const { return indices.size() == 1; }
  bool contains(int i) const;
};

StateV utilities(const BimatrixGame& game, const StateP& state);
BestResponseSet best_response_set(const Vec& v, double tol = kTieTol, Player player = Player::A);
StateP interior_equilibrium(const BimatrixGame& game);

struct TransversalityViolation {
  Player matrix;  // A: a column of A, B: a row of B
  int line;
  int first;
  int second;
};

struct TransversalityReport {
  bool ok = true;
  std::vector<TransversalityViolation> violations;
};

TransversalityReport check_transversality(const BimatrixGame& game);

// max |A + sigma (B - J)| for make_shapley(beta)
double zero_sum_certificate(double beta);

}  // namespace fpdyn
