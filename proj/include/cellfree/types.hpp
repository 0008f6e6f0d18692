// cellfree-dl: distributed precoding simulator for cell-free massive MIMO downlink
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#ifndef CELLFREE_TYPES_HPP
#define CELLFREE_TYPES_HPP

#include <Eigen/Dense>
#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

namespace cellfree
{

using Real = double;
using Complex = std::complex<Real>;
using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using IndexSet = std::vector<int>;

enum class Scheme
{
    MRT,
    FZF,
    PZF,
    PPZF,
    RZF
};

enum class Policy
{
    Heuristic,
    MaxMin
};

std::string to_string(Scheme s);
std::string to_string(Policy p);
Scheme scheme_from_string(const std::string &name);
Policy policy_from_string(const std::string &name);

/// Thrown when a zero-forcing construction lacks spatial degrees of freedom
/// (number of antennas not larger than the number of directions to cancel).
class InsufficientDofError : public std::runtime_error
{
  public:
    InsufficientDofError(int antennas, int directions)
        : std::runtime_error("insufficient degrees of freedom: M=" + std::to_string(antennas) +
                             " <= directions=" + std::to_string(directions)),
          antennas(antennas), directions(directions)
    {
    }
    int antennas;
    int directions;
};

/// Thrown when a Gram matrix is numerically rank deficient.
class RankDeficientError : public std::runtime_error
{
  public:
    explicit RankDeficientError(double condition_number)
        : std::runtime_error("rank-deficient Gram matrix, condition number " +
                             std::to_string(condition_number)),
          condition_number(condition_number)
    {
    }
    double condition_number;
};

/// Thrown when a shadowing covariance matrix fails the PSD check.
class NotPsdError : public std::runtime_error
{
  public:
    explicit NotPsdError(double min_eigenvalue)
        : std::runtime_error("covariance not positive semi-definite, min eigenvalue " +
                             std::to_string(min_eigenvalue)),
          min_eigenvalue(min_eigenvalue)
    {
    }
    double min_eigenvalue;
};

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
inline double linear_to_db(double x) { return 10.0 * std::log10(x); }

} // namespace cellfree

#endif // CELLFREE_TYPES_HPP
