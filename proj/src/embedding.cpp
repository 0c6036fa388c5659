#include "lunggan/embedding.hpp"

#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace lunggan {

Eigen::MatrixXd PcaReducer::fit_transform(const Eigen::MatrixXd& rows) {
  if (rows.rows() < 2) throw ArgumentError("PCA needs at least two samples");
  Eigen::RowVectorXd mean = rows.colwise().mean();
  Eigen::MatrixXd centered = rows.rowwise() - mean;
  Eigen::MatrixXd cov =
      (centered.transpose() * centered) / static_cast<double>(rows.rows() - 1);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(cov);
  if (solver.info() != Eigen::Success) throw NumericalError("PCA eigendecomposition failed");
  // Eigen returns eigenvalues ascending; take the last two columns.
  Eigen::Index d = cov.cols();
  if (d < 2) throw ArgumentError("PCA needs at least two feature dimensions");
  Eigen::MatrixXd basis(d, 2);
  basis.col(0) = solver.eigenvectors().col(d - 1);
  basis.col(1) = solver.eigenvectors().col(d - 2);
  for (int c = 0; c < 2; ++c) {
    Eigen::Index argmax = 0;
    basis.col(c).cwiseAbs().maxCoeff(&argmax);
    if (basis(argmax, c) < 0.0) basis.col(c) = -basis.col(c);
  }
  return centered * basis;
}

std::unique_ptr<Reducer> make_reducer(const std::string& spec) {
  if (spec == "pca") return std::make_unique<PcaReducer>();
  throw ValidationError("reducer", "unknown reducer '" + spec + "'");
}

void write_embedding_csv(const std::filesystem::path& path, const LatentEmbedding& embedding) {
  std::ofstream out(path);
  if (!out) throw LoadError("cannot write " + path.string());
  out << "latent_id,x,y,branch_count\n";
  char buf[128];
  for (const auto& p : embedding.points) {
    std::snprintf(buf, sizeof(buf), "%" PRId64 ",%.17g,%.17g,", p.latent_id, p.x, p.y);
    out << buf;
    if (p.branch_count) out << *p.branch_count;
    out << "\n";
  }
}

LatentEmbedding read_embedding_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw LoadError("cannot open " + path.string());
  LatentEmbedding embedding;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (first) {
      first = false;
      if (line.rfind("latent_id,", 0) == 0) continue;
    }
    std::istringstream ss(line);
    std::string field;
    EmbeddingPoint p;
    if (!std::getline(ss, field, ',')) throw LoadError(path.string() + ": malformed row");
    p.latent_id = std::stoll(field);
    if (!std::getline(ss, field, ',')) throw LoadError(path.string() + ": malformed row");
    p.x = std::stod(field);
    if (!std::getline(ss, field, ',')) throw LoadError(path.string() + ": malformed row");
    p.y = std::stod(field);
    if (std::getline(ss, field, ',') && !field.empty()) p.branch_count = std::stoi(field);
    embedding.points.push_back(p);
  }
  return embedding;
}

}  // namespace lunggan
