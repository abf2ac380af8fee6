#include "hodgeflow/spectral.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <cmath>

using namespace hodgeflow;

namespace {

Vector vec(std::initializer_list<double> v) {
  Vector out(static_cast<Index>(v.size()));
  Index i = 0;
  for (double x : v) out[i++] = x;
  return out;
}

SimilarityMatrix from_dense(const Matrix& w) { return w.sparseView(); }

Matrix two_cliques(Index size, double bridge) {
  const Index n = 2 * size;
  Matrix w = Matrix::Zero(n, n);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j)
      if (i != j && (i < size) == (j < size)) w(i, j) = 1.0;
  if (bridge > 0.0) w(size - 1, size) = w(size, size - 1) = bridge;
  return w;
}

// Pair-counting form of ARI, independent of the contingency-table formula.
double ari_pairs(const std::vector<Index>& x, const std::vector<Index>& y) {
  double a = 0, b = 0, c = 0, d = 0;
  for (std::size_t i = 0; i < x.size(); ++i)
    for (std::size_t j = i + 1; j < x.size(); ++j) {
      const bool sx = x[i] == x[j], sy = y[i] == y[j];
      if (sx && sy) ++a;
      else if (sx) ++b;
      else if (sy) ++c;
      else ++d;
    }
  return 2.0 * (a * d - b * c) / ((a + b) * (b + d) + (a + c) * (c + d));
}

}  // namespace

TEST_CASE("symmetrize_mean") {
  CHECK(symmetrize_mean(vec({10, 0, 5}), vec({4, 0, 5})) == vec({7, 0, 5}));
  CHECK_THROWS_AS(symmetrize_mean(vec({-1}), vec({0})), InvalidInput);
}

TEST_CASE("gaussian similarity") {
  const FlowGraph g = oracle::path(4);
  const SimilarityMatrix s = gaussian_similarity(g, vec({0.0, 1.0, 2.0}), 1.0);
  CHECK(s.coeff(0, 1) == 0.0);
  CHECK(s.coeff(1, 2) > 0.0);
  CHECK(s.coeff(1, 2) < s.coeff(2, 3));
  CHECK(s.coeff(2, 3) < 1.0);
  CHECK(s.coeff(2, 1) == s.coeff(1, 2));
  // m = σ: 1 − e^{−1/2}
  const double at_sigma = gaussian_similarity(oracle::path(2), vec({3.0}), 3.0).coeff(0, 1);
  CHECK(at_sigma == doctest::Approx(0.39346934028736658).epsilon(1e-14));
  CHECK(at_sigma == doctest::Approx(1.0 - std::exp(-0.5)).epsilon(1e-14));
  CHECK_THROWS_AS(gaussian_similarity(g, vec({1, 1, 1}), 0.0), InvalidInput);
  CHECK_THROWS_AS(gaussian_similarity(g, vec({1, -1, 1}), 1.0), InvalidInput);
}

TEST_CASE("median heuristic") {
  CHECK(median_nonzero(vec({0, 3, 1, 2})) == 2.0);
  CHECK(median_nonzero(vec({0, 4, 1, 2, 3})) == 2.5);
}

TEST_CASE("blend_distance") {
  Matrix w = Matrix::Zero(3, 3);
  w(0, 1) = w(1, 0) = 0.4;
  const SimilarityMatrix s = from_dense(w);
  const double sigma_d = 10.0;
  // dist chosen so that the distance kernel equals 0.8
  const double dist = sigma_d * std::sqrt(-2.0 * std::log(0.8));
  const std::vector<Point2> coords = {{0, 0}, {dist, 0}, {0, 0}};

  CHECK(Matrix(blend_distance(s, coords, sigma_d, 1.0)) == Matrix(s));
  const Matrix half = blend_distance(s, coords, sigma_d, 0.5);
  CHECK(half(0, 1) == doctest::Approx(0.6).epsilon(1e-12));
  CHECK((half - half.transpose()).isZero(0.0));
  const Matrix none = blend_distance(s, coords, sigma_d, 0.0);
  CHECK(none(0, 2) == doctest::Approx(1.0));  // coincident points
  CHECK_THROWS_AS(blend_distance(s, {{0, 0}}, sigma_d, 0.5), InvalidInput);
  CHECK_THROWS_AS(blend_distance(s, coords, sigma_d, 1.5), InvalidInput);
}

TEST_CASE("smallest eigenpairs") {
  SUBCASE("P2") {
    const SpectralEmbedding e = smallest_eigenpairs(graph_laplacian(oracle::path(2)), 1, true);
    CHECK(e.eigenvalues[0] == doctest::Approx(2.0));
    CHECK(e.vectors(0, 0) == doctest::Approx(1.0 / std::sqrt(2.0)));
    CHECK(e.vectors(1, 0) == doctest::Approx(-1.0 / std::sqrt(2.0)));
  }
  SUBCASE("connected graph: constant null vector") {
    std::mt19937_64 rng(61);
    const FlowGraph g = oracle::random_connected(20, 0.2, rng);
    const SpectralEmbedding e = smallest_eigenpairs(graph_laplacian(g), 1, false);
    CHECK(std::abs(e.eigenvalues[0]) <= 1e-10);
    CHECK((e.vectors.col(0).array() - 1.0 / std::sqrt(20.0)).abs().maxCoeff() <= 1e-8);
  }
  SUBCASE("two K3s have two null eigenvalues") {
    const FlowGraph g = build_graph({{0, 1}, {1, 2}, {0, 2}, {3, 4}, {4, 5}, {3, 5}}, 6).graph;
    const SpectralEmbedding e = smallest_eigenpairs(graph_laplacian(g), 3, false);
    CHECK((e.eigenvalues.array() < 1e-8).count() == 2);
    CHECK(e.eigenvalues[2] == doctest::Approx(3.0));
    CHECK_THROWS_AS(smallest_eigenpairs(graph_laplacian(g), 5, true), InvalidInput);
  }
  SUBCASE("matches a dense oracle; Rayleigh consistency; signs") {
    std::mt19937_64 rng(67);
    for (int t = 0; t < 10; ++t) {
      const FlowGraph g = oracle::random_connected(30, 0.15, rng);
      const SparseOperator l = graph_laplacian(g);
      Eigen::SelfAdjointEigenSolver<Matrix> es{Matrix(l)};
      const SpectralEmbedding e = smallest_eigenpairs(l, 4, true);
      CHECK((e.eigenvalues - es.eigenvalues().segment(1, 4)).norm() <= 1e-9);
      CHECK((e.vectors.transpose() * Matrix(l) * e.vectors).trace() == doctest::Approx(e.eigenvalues.sum()).epsilon(1e-8));
      CHECK((e.vectors.transpose() * e.vectors - Matrix::Identity(4, 4)).norm() <= 1e-8);
      for (Index j = 0; j < 4; ++j) {
        Index arg = 0;
        e.vectors.col(j).cwiseAbs().maxCoeff(&arg);
        CHECK(e.vectors(arg, j) > 0.0);
      }
    }
  }
  SUBCASE("iterative path agrees with the dense path") {
    std::mt19937_64 rng(71);
    const FlowGraph g = oracle::random_connected(300, 0.01, rng);
    const SparseOperator l = graph_laplacian(g);
    EigenOptions iterative;
    iterative.dense_limit = 10;
    const SpectralEmbedding a = smallest_eigenpairs(l, 3, true);
    const SpectralEmbedding b = smallest_eigenpairs(l, 3, true, iterative);
    CHECK((a.eigenvalues - b.eigenvalues).norm() <= 1e-8 * a.eigenvalues.norm());
    CHECK((a.vectors - b.vectors).norm() <= 1e-6);
  }
  SUBCASE("k out of range") {
    CHECK_THROWS_AS(smallest_eigenpairs(graph_laplacian(oracle::path(3)), 4, false), InvalidInput);
    CHECK_THROWS_AS(smallest_eigenpairs(graph_laplacian(oracle::path(3)), 0, false), InvalidInput);
  }
}

TEST_CASE("normalized embedding is D-orthonormal") {
  std::mt19937_64 rng(73);
  const FlowGraph g = oracle::random_connected(25, 0.2, rng);
  const SimilarityMatrix s = gaussian_similarity(g, oracle::random_vector(g.edge_count(), rng).cwiseAbs(), 1.0);
  const SpectralEmbedding e = spectral_embedding(s, 3, CutVariant::normalized_cut, false);
  const Vector deg = Matrix(similarity_laplacian(s)).diagonal();
  CHECK((e.vectors.transpose() * deg.asDiagonal() * e.vectors - Matrix::Identity(3, 3)).norm() <= 1e-6);
}

TEST_CASE("spectral clustering") {
  for (CutVariant v : {CutVariant::ratio_cut, CutVariant::normalized_cut}) {
    SUBCASE("two disjoint K4s") {
      const ClusterAssignment a = spectral_cluster(from_dense(two_cliques(4, 0.0)), 2, v, 1);
      CHECK(adjusted_rand_index(a.labels, {0, 0, 0, 0, 1, 1, 1, 1}) == 1.0);
    }
    SUBCASE("two K8s joined by a weak edge, against brute-force RatioCut") {
      const Matrix w = two_cliques(8, 0.01);
      const auto [best, arg] = oracle::best_two_partition(w);
      for (std::uint64_t seed : {0u, 1u, 2u}) {
        const ClusterAssignment a = spectral_cluster(from_dense(w), 2, v, seed);
        CHECK(oracle::same_partition(a.labels, arg));
        CHECK(ratio_cut(from_dense(w), a.labels) == doctest::Approx(best));
        // no single-node split beats it
        for (Index i = 0; i < 16; ++i) {
          std::vector<Index> single(16, 0);
          single[static_cast<std::size_t>(i)] = 1;
          CHECK(ratio_cut(from_dense(w), a.labels) <= oracle::ratio_cut(w, single, 2));
        }
      }
    }
  }
  SUBCASE("k = 1") {
    const ClusterAssignment a = spectral_cluster(from_dense(two_cliques(3, 0.5)), 1, CutVariant::ratio_cut, 0);
    CHECK(std::all_of(a.labels.begin(), a.labels.end(), [](Index l) { return l == 0; }));
    const SpectralEmbedding e = spectral_embedding(from_dense(two_cliques(3, 0.5)), 1, CutVariant::ratio_cut, false);
    const Vector c = e.vectors.col(0).array() - e.vectors.col(0).mean();
    CHECK(a.inertia == doctest::Approx(c.squaredNorm()).epsilon(1e-9));
  }
  SUBCASE("errors") {
    Matrix w = two_cliques(3, 0.0);
    w(0, 1) = 0.5;
    CHECK_THROWS_AS(spectral_cluster(from_dense(w), 2, CutVariant::ratio_cut, 0), InvalidInput);
    Matrix iso = two_cliques(3, 0.0);
    iso.row(0).setZero();
    iso.col(0).setZero();
    CHECK_THROWS_WITH_AS(spectral_cluster(from_dense(iso), 2, CutVariant::ratio_cut, 0),
                         doctest::Contains("isolated node"), InvalidInput);
  }
}

TEST_CASE("kmeans") {
  Matrix pts(4, 2);
  pts << 0, 0, 0, 0.1, 10, 10, 10, 10.1;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const ClusterAssignment a = kmeans(pts, 2, seed);
    CHECK(oracle::same_partition(a.labels, {0, 0, 1, 1}));
    CHECK(a.inertia == doctest::Approx(0.01));
    CHECK(a.seed == seed);
  }
  const ClusterAssignment all = kmeans(pts, 4, 3);
  CHECK(all.inertia == 0.0);
  CHECK(oracle::same_partition(all.labels, {0, 1, 2, 3}));

  const Matrix same = Matrix::Ones(6, 2);
  const ClusterAssignment deg = kmeans(same, 2, 0);
  CHECK(deg.labels.size() == 6);
  CHECK(std::count(deg.labels.begin(), deg.labels.end(), 0) > 0);
  CHECK(std::count(deg.labels.begin(), deg.labels.end(), 1) > 0);

  std::mt19937_64 rng(79);
  Matrix cloud(60, 3);
  for (Index i = 0; i < 60; ++i) cloud.row(i) = oracle::random_vector(3, rng).transpose();
  const ClusterAssignment a = kmeans(cloud, 4, 5);
  const ClusterAssignment b = kmeans(cloud, 4, 5);
  CHECK(a.labels == b.labels);
  CHECK(a.inertia == b.inertia);
  for (std::size_t i = 1; i < a.inertia_trace.size(); ++i) CHECK(a.inertia_trace[i] <= a.inertia_trace[i - 1] + 1e-12);
  // fixpoint: every point is nearest its own centroid
  Matrix centroids = Matrix::Zero(4, 3);
  Vector counts = Vector::Zero(4);
  for (Index i = 0; i < 60; ++i) {
    centroids.row(a.labels[static_cast<std::size_t>(i)]) += cloud.row(i);
    counts[a.labels[static_cast<std::size_t>(i)]] += 1;
  }
  for (Index c = 0; c < 4; ++c) {
    CHECK(counts[c] > 0);
    centroids.row(c) /= counts[c];
  }
  double inertia = 0.0;
  for (Index i = 0; i < 60; ++i) {
    const double own = (cloud.row(i) - centroids.row(a.labels[static_cast<std::size_t>(i)])).squaredNorm();
    inertia += own;
    for (Index c = 0; c < 4; ++c) CHECK(own <= (cloud.row(i) - centroids.row(c)).squaredNorm() + 1e-12);
  }
  CHECK(a.inertia == doctest::Approx(inertia));
  CHECK_THROWS_AS(kmeans(pts, 5, 0), InvalidInput);
}

TEST_CASE("cut objectives") {
  std::mt19937_64 rng(83);
  Matrix w = Matrix::Zero(8, 8);
  for (Index i = 0; i < 8; ++i)
    for (Index j = i + 1; j < 8; ++j) w(i, j) = w(j, i) = std::abs(oracle::random_vector(1, rng)[0]);
  const std::vector<Index> labels = {0, 1, 0, 2, 1, 2, 0, 1};
  CHECK(ratio_cut(from_dense(w), labels) == doctest::Approx(oracle::ratio_cut(w, labels, 3)));
  double ncut = 0.0;
  for (Index c = 0; c < 3; ++c) {
    double cut = 0.0, vol = 0.0;
    for (Index i = 0; i < 8; ++i) {
      if (labels[static_cast<std::size_t>(i)] != c) continue;
      vol += w.row(i).sum();
      for (Index j = 0; j < 8; ++j)
        if (labels[static_cast<std::size_t>(j)] != c) cut += w(i, j);
    }
    ncut += cut / vol;
  }
  CHECK(normalized_cut(from_dense(w), labels) == doctest::Approx(ncut));
}

TEST_CASE("adjusted rand index") {
  CHECK(adjusted_rand_index({0, 0, 1, 1}, {1, 1, 0, 0}) == 1.0);
  const std::vector<Index> a = {0, 0, 1, 1, 2, 2, 0, 1};
  const std::vector<Index> b = {0, 1, 1, 1, 2, 0, 0, 2};
  CHECK(adjusted_rand_index(a, b) == doctest::Approx(ari_pairs(a, b)).epsilon(1e-12));
  std::mt19937_64 rng(89);
  std::uniform_int_distribution<Index> pick(0, 3);
  for (int t = 0; t < 20; ++t) {
    std::vector<Index> x(30), y(30);
    for (auto& v : x) v = pick(rng);
    for (auto& v : y) v = pick(rng);
    CHECK(adjusted_rand_index(x, y) == doctest::Approx(ari_pairs(x, y)).epsilon(1e-12));
  }
}

TEST_CASE("silhouette") {
  Matrix pts(4, 1);
  pts << 0, 1, 10, 12;
  // hand: a/b per point
  const double s0 = (11.0 - 1.0) / 11.0, s1 = (10.0 - 1.0) / 10.0, s2 = (9.5 - 2.0) / 9.5, s3 = (11.5 - 2.0) / 11.5;
  CHECK(silhouette(pts, {0, 0, 1, 1}) == doctest::Approx((s0 + s1 + s2 + s3) / 4.0));
  CHECK(silhouette(pts, {0, 0, 0, 0}) == 0.0);
}
