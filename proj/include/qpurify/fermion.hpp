#ifndef QPURIFY_FERMION_HPP
#define QPURIFY_FERMION_HPP

#include <utility>
#include <vector>

#include "qpurify/purification.hpp"

namespace qpurify {

enum class Parity { Even, Odd };

/// Fermionic Fock space on m modes realized as m qubits via Jordan-Wigner:
/// c_{2j-1} = Z_1..Z_{j-1} X_j, c_{2j} = Z_1..Z_{j-1} Y_j, P = Z_1..Z_m.
struct FermionSystem {
  int modes = 0;
  Dims qubit_dims;
  std::vector<Matrix> majorana;  // 2m Hermitian operators
  Matrix parity;
  std::vector<Matrix> number_op;  // m

  static FermionSystem make(int m);
  Index dim() const { return Index(1) << modes; }
};

/// Coefficients of H = i sum_{jk} h_{jk} c_j c_k with h real antisymmetric.
struct QuadraticHamiltonian {
  RealMatrix h;

  QuadraticHamiltonian() = default;
  explicit QuadraticHamiltonian(RealMatrix h_in);
  int majorana_count() const { return static_cast<int>(h.rows()); }
};

Matrix quadratic_hamiltonian_matrix(const FermionSystem& fs,
                                    const QuadraticHamiltonian& q);

struct GaussianUnitary {
  Matrix u;
  RealMatrix rotation;  // R with U c_j U^dag = sum_k R_{kj} c_k
  double residual = 0.0;
};

/// exp(i H t) together with the SO(2m) rotation recovered from the adjoint
/// action (solved from traces against the Majorana basis, not assumed).
GaussianUnitary gaussian_unitary(const FermionSystem& fs,
                                 const QuadraticHamiltonian& q, double t);

/// Rotation implemented by an arbitrary unitary, with the residual of the
/// linear Majorana action (large residual means u is not Gaussian).
RealMatrix adjoint_rotation(const FermionSystem& fs, const Matrix& u,
                            double* residual = nullptr);

/// Gibbs state exp(-H)/Z of the quadratic Hamiltonian.
Matrix gaussian_mixed_state(const FermionSystem& fs,
                            const QuadraticHamiltonian& q);

/// M_{jk} = (i/2) tr(rho [c_j, c_k]).
RealMatrix covariance_matrix(const FermionSystem& fs, const Matrix& rho);
RealMatrix covariance_matrix(const FermionSystem& fs, const Vector& psi);

struct GaussianityCheck {
  double pairing_residual = 0.0;     // ||Lambda (psi (x) psi)||
  double covariance_residual = 0.0;  // ||M M^T - I||
};
GaussianityCheck gaussian_pure_check(const FermionSystem& fs,
                                     const Vector& psi);
bool is_gaussian_pure(const FermionSystem& fs, const Vector& psi,
                      double tol = 1e-8);

/// Quadratic coefficients h with exp(-4h) = r (principal matrix log).
/// Throws InvalidInput when r has an eigenvalue at -1; callers perturb
/// and resample in that measure-zero case.
QuadraticHamiltonian rotation_generator(const RealMatrix& r);

/// Gaussian unitary implementing the rotation r (phase is arbitrary).
Matrix gaussian_unitary_for_rotation(const FermionSystem& fs,
                                     const RealMatrix& r);

StateVector reference_state(const FermionSystem& fs, Parity parity);

/// U_R |ref> with R Haar on SO(2m); pushforward of the Haar measure onto
/// the pure Gaussian states of the chosen parity sector.
StateVector random_pure_gaussian(const FermionSystem& fs, Parity parity,
                                 RngStream& rng);
/// Same sample but also exposing the rotation (used by the POVM samplers).
std::pair<Vector, RealMatrix> random_pure_gaussian_with_rotation(
    const FermionSystem& fs, Parity parity, RngStream& rng);
Vector gaussian_state_from_rotation(const FermionSystem& fs,
                                    const RealMatrix& r, Parity parity);

double parity_expectation(const FermionSystem& fs, const Vector& psi);

/// gamma(x) = 0 if |x| = 0,1 (mod 4), else 1.
int gamma_exponent(Index x);

/// m modes plus a reference copy, with H_m (x) H_m identified with H_{2m};
/// the purifying basis is |x'> = (-1)^{gamma(x)} |x>.
struct DoubledSystem {
  FermionSystem base;     // m modes
  FermionSystem doubled;  // 2m modes; doubled.majorana are the c-tilde ops
  Matrix gamma_map;       // diagonal sign unitary on 2^m

  static DoubledSystem make(int m);
};

/// (sqrt(rho) (x) I) sum_x (-1)^{gamma(x)} |xx>; Gaussian and even-parity
/// on 2m modes whenever rho is a Gaussian state.
StateVector signed_standard_purification(const DoubledSystem& ds,
                                         const Matrix& rho);

/// Gaussian circuit U_m ... U_1 |0>^{2m} with U_k = exp(-i H_k theta_k),
/// H_k = -i ct_{2k} ct_{2m+2k}, reproducing the signed diagonal purification.
std::pair<StateVector, std::vector<GaussianUnitary>>
diagonal_purification_circuit(const DoubledSystem& ds,
                              const std::vector<double>& thetas);

/// Trace distance between rho and the Gaussian state reconstructed from its
/// covariance matrix; ~0 iff rho is a Gaussian mixed state.
double gaussian_state_residual(const FermionSystem& fs, const Matrix& rho);

struct FermiChannel {
  int modes = 0;
  int copies = 0;
  AlgebraBasis algebra;  // commutant of the copy-summed quadratics
  PurificationChannel channel;
  std::vector<int> interleave;  // qubit permutation to (H_2m)^{(x) n}
};

/// Random purification channel for n copies of an m-mode Gaussian state.
FermiChannel fermi_purify_channel(int m, int n, RngStream& rng);

/// Random Gaussian mixed state (Gibbs state of a random quadratic h).
Matrix random_gaussian_mixed(const FermionSystem& fs, RngStream& rng,
                             double scale = 1.0);

/// Gaussian unitary for a Haar-random rotation.
Matrix random_gaussian_unitary(const FermionSystem& fs, RngStream& rng);

}  // namespace qpurify

#endif
