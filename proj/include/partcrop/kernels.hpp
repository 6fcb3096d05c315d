#pragma once

// Batched response-energy kernels. Each has a straightforward serial form,
// kept as the reference for tests, and an OpenMP form used by the pipeline.
// Both produce bit-identical results: every query is evaluated independently
// by the same scalar code, only the loop distribution differs.

#include <span>
#include <vector>

#include "partcrop/core_math.hpp"

namespace partcrop {

struct ResponseEnergies {
  std::vector<double> uniform;   ///< e^u_i per query, query order
  std::vector<double> gaussian;  ///< e^g_i per query, query order
};

/// For every query row p_i of `queries` (m x D): v_i = softmax(chi * p_i),
/// e^u_i = KL(u || v_i), e^g_i = KL(g_i || v_i). `gaussian` holds one
/// benchmark per query, each of length chi.rows().
ResponseEnergies response_energies_serial(const Matrix& chi, const Matrix& queries,
                                          std::span<const ProbVector> gaussian);

ResponseEnergies response_energies(const Matrix& chi, const Matrix& queries,
                                   std::span<const ProbVector> gaussian);

/// All m x N similarity rows, i.e. queries * chi^T.
Matrix similarity_matrix_serial(const Matrix& chi, const Matrix& queries);
Matrix similarity_matrix(const Matrix& chi, const Matrix& queries);

}  // namespace partcrop
