#include "partcrop/kernels.hpp"

#include <cstddef>
#include <exception>
#include <string>

#include "partcrop/errors.hpp"

namespace partcrop {

namespace {

void check_shapes(const Matrix& chi, const Matrix& queries, std::span<const ProbVector> gaussian) {
  if (chi.cols() != queries.cols()) {
    throw InvalidInput("query dim " + std::to_string(queries.cols()) + " != map dim " +
                       std::to_string(chi.cols()));
  }
  if (gaussian.size() != queries.rows()) {
    throw InvalidInput("need one gaussian benchmark per query");
  }
  for (const auto& g : gaussian) {
    if (g.size() != chi.rows()) throw InvalidInput("gaussian benchmark length != N");
  }
}

void energy_for_query(const Matrix& chi, const Matrix& queries, const ProbVector& uniform,
                      std::span<const ProbVector> gaussian, std::size_t i, ResponseEnergies& out) {
  const auto v = softmax(query_similarities(chi, queries.row(i)));
  out.uniform[i] = kl_energy(v, uniform);
  out.gaussian[i] = kl_energy(v, gaussian[i]);
}

void similarity_row(const Matrix& chi, const Matrix& queries, std::size_t i, Matrix& out) {
  const auto p = queries.row(i);
  auto dst = out.row(i);
  for (std::size_t j = 0; j < chi.rows(); ++j) {
    const auto x = chi.row(j);
    double acc = 0.0;
    for (std::size_t d = 0; d < x.size(); ++d) acc += x[d] * p[d];
    dst[j] = acc;
  }
}

}  // namespace

ResponseEnergies response_energies_serial(const Matrix& chi, const Matrix& queries,
                                          std::span<const ProbVector> gaussian) {
  check_shapes(chi, queries, gaussian);
  const auto uniform = uniform_distribution(chi.rows());
  ResponseEnergies out{std::vector<double>(queries.rows()), std::vector<double>(queries.rows())};
  for (std::size_t i = 0; i < queries.rows(); ++i) {
    energy_for_query(chi, queries, uniform, gaussian, i, out);
  }
  return out;
}

ResponseEnergies response_energies(const Matrix& chi, const Matrix& queries,
                                   std::span<const ProbVector> gaussian) {
  check_shapes(chi, queries, gaussian);
  const auto uniform = uniform_distribution(chi.rows());
  ResponseEnergies out{std::vector<double>(queries.rows()), std::vector<double>(queries.rows())};
  const auto m = static_cast<std::ptrdiff_t>(queries.rows());
  std::exception_ptr failure;
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < m; ++i) {
    try {
      energy_for_query(chi, queries, uniform, gaussian, static_cast<std::size_t>(i), out);
    } catch (...) {
#pragma omp critical(partcrop_energy_failure)
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
  return out;
}

Matrix similarity_matrix_serial(const Matrix& chi, const Matrix& queries) {
  if (chi.cols() != queries.cols()) throw InvalidInput("similarity_matrix dimension mismatch");
  Matrix out(queries.rows(), chi.rows());
  for (std::size_t i = 0; i < queries.rows(); ++i) similarity_row(chi, queries, i, out);
  return out;
}

Matrix similarity_matrix(const Matrix& chi, const Matrix& queries) {
  if (chi.cols() != queries.cols()) throw InvalidInput("similarity_matrix dimension mismatch");
  Matrix out(queries.rows(), chi.rows());
  const auto m = static_cast<std::ptrdiff_t>(queries.rows());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < m; ++i) similarity_row(chi, queries, static_cast<std::size_t>(i), out);
  return out;
}

}  // namespace partcrop
