#include <fstream>
#include <iomanip>
#include <sstream>

#include "rpgd/harness.h"

namespace rpgd {

Matrix read_matrix(std::istream& in) {
  std::string header;
  if (!std::getline(in, header)) throw DataError("matrix file: empty input");
  std::istringstream hs(header);
  long long rows = -1, cols = -1;
  std::string extra;
  if (!(hs >> rows >> cols) || (hs >> extra) || rows < 1 || cols < 1) {
    throw DataError("matrix file: first line must be 'rows cols' with positive "
                    "integers, got '" + header + "'");
  }
  Matrix m(rows, cols);
  std::string line;
  long long r = 0;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    std::istringstream ls(line);
    std::vector<double> vals;
    for (std::string tok; ls >> tok;) {
      std::size_t used = 0;
      double v = 0;
      try {
        v = std::stod(tok, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used != tok.size()) {
        throw DataError("matrix file line " + std::to_string(lineno) +
                        ": not a number '" + tok + "'");
      }
      vals.push_back(v);
    }
    if (vals.empty()) continue;
    if (r == rows) {
      throw DataError("matrix file line " + std::to_string(lineno) +
                      ": more than " + std::to_string(rows) + " rows");
    }
    if (static_cast<long long>(vals.size()) != cols) {
      throw DataError("matrix file line " + std::to_string(lineno) + ": " +
                      std::to_string(vals.size()) + " entries, expected " +
                      std::to_string(cols));
    }
    for (long long c = 0; c < cols; ++c) m(r, c) = vals[c];
    ++r;
  }
  if (r != rows) {
    throw DataError("matrix file: " + std::to_string(r) + " rows, expected " +
                    std::to_string(rows));
  }
  return m;
}

Matrix load_matrix(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot read matrix file " + path.string());
  try {
    return read_matrix(in);
  } catch (const DataError& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

void write_matrix(std::ostream& out, const Matrix& m) {
  out << m.rows() << " " << m.cols() << "\n";
  std::ostringstream os;
  os << std::setprecision(17);
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (j) os << " ";
      os << m(i, j);
    }
    os << "\n";
  }
  out << os.str();
}

}  // namespace rpgd
