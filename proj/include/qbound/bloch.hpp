// Generalized Bloch-sphere algebra: the generalized Gell-Mann basis, the
// symmetric structure constants d_ijk, state <-> vector conversion, the star
// product, and the overlap -> Bloch-angle map.
//
// A d-dimensional state is written rho = (1/d)(I + c_d n.sigma) with
// c_d = sqrt(d(d-1)/2) and n a real vector of length d^2 - 1.  The basis
// matrices satisfy tr(sigma_i) = 0 and tr(sigma_i sigma_j) = 2 delta_ij.
//
// Basis ordering (fixed; consumers relying on index positions must use it):
//   1. symmetric off-diagonal   E_jk + E_kj          for j < k, row-major
//   2. antisymmetric off-diag  -i E_jk + i E_kj      for j < k, row-major
//   3. diagonal                 sqrt(2/(l(l+1))) (sum_{m<l} E_mm - l E_ll)
//                               for l = 1 .. d-1
// For d = 2 this yields exactly (sigma_x, sigma_y, sigma_z).

#pragma once

#include "qbound/common.hpp"

#include <vector>

namespace qbound {

class BlochBasis {
  public:
    explicit BlochBasis(int dim);

    int dim() const { return dim_; }
    // Number of basis matrices, d^2 - 1.
    int size() const { return static_cast<int>(matrices_.size()); }
    double c_d() const { return c_d_; }
    const std::vector<ComplexMatrix>& matrices() const { return matrices_; }
    const ComplexMatrix& matrix(int i) const { return matrices_[i]; }

    // Symmetric structure constant d_ijk = tr({sigma_i, sigma_j} sigma_k)/4.
    double d_tensor(int i, int j, int k) const {
        const int n = size();
        return d_tensor_[(static_cast<std::size_t>(i) * n + j) * n + k];
    }

  private:
    int dim_;
    double c_d_;
    std::vector<ComplexMatrix> matrices_;
    std::vector<double> d_tensor_;
};

// Cached basis for a dimension; built once, safe for concurrent use.
const BlochBasis& bloch_basis(int dim);

struct QuditState {
    int dim = 0;
    Vector bloch;      // length dim^2 - 1
    bool pure = false; // |n| = 1 and, for d >= 3, n * n = n (within 1e-9)

    ComplexMatrix matrix() const;
};

// Builds the state for a Bloch vector and validates positivity
// (smallest eigenvalue >= -1e-9).
QuditState state_from_bloch(int dim, const Vector& n);

// Inverts the Bloch representation: n_i = (d / (2 c_d)) tr(rho sigma_i).
// Requires rho Hermitian with unit trace (within 1e-9); positivity is not
// checked so projector-like inputs are accepted.
QuditState bloch_from_state(const ComplexMatrix& rho);

// Hermitian matrix for an arbitrary Bloch vector, (1/d)(I + c_d n.sigma),
// without any state validation.
ComplexMatrix bloch_matrix(int dim, const Vector& n);

// Star product (u * v)_i = c_d/(d-2) sum_jk d_ijk u_j v_k.  Undefined at
// d = 2 (throws DomainError).
Vector star_product(const Vector& u, const Vector& v, const BlochBasis& basis);

// Angle between the symmetry axis and each of the two pure qubit states
// (+-sin theta, 0, cos theta) whose overlap is exactly delta: arccos(delta).
double bloch_angle_from_overlap(double delta);

}  // namespace qbound
