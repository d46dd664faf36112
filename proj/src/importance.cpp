#include "bsel/importance.hpp"

#include <algorithm>
#include <stdexcept>

namespace bsel {

void ImportanceMatrix::validate() const {
  if (vi.rows() != vi.cols() || counts.rows() != vi.rows())
    throw std::logic_error("ImportanceMatrix: shape mismatch");
  for (Eigen::Index j = 0; j < vi.rows(); ++j)
    for (Eigen::Index l = 0; l < vi.cols(); ++l) {
      if (counts(j, l) != counts(l, j)) throw std::logic_error("ImportanceMatrix: asymmetric");
      if (counts(j, l) > std::min(counts(j, j), counts(l, l)))
        throw std::logic_error("ImportanceMatrix: pair count exceeds marginal");
    }
}

ImportanceMatrix vi_matrix(const std::vector<Subset>& members, int p) {
  if (members.empty()) throw std::invalid_argument("vi_matrix: empty family");
  ImportanceMatrix im;
  im.family_size = static_cast<int>(members.size());
  im.counts.setZero(p, p);
  for (const auto& s : members)
    for (std::size_t a = 0; a < s.indices.size(); ++a)
      for (std::size_t b = a; b < s.indices.size(); ++b) {
        const int j = s.indices[a], l = s.indices[b];
        if (j < 0 || l >= p) throw std::invalid_argument("vi_matrix: index out of range");
        ++im.counts(j, l);
        if (j != l) ++im.counts(l, j);
      }
  im.vi = im.counts.cast<double>() / static_cast<double>(im.family_size);
  return im;
}

ImportanceMatrix vi_matrix(const AcceptableFamily& family, const SubsetLosses& losses,
                           int p) {
  std::vector<Subset> members;
  for (int r : family.member_rows) members.push_back(losses.rows.at(r).subset);
  return vi_matrix(members, p);
}

std::vector<int> keystones(const ImportanceMatrix& im) {
  std::vector<int> out;
  for (Eigen::Index j = 0; j < im.vi.rows(); ++j)
    if (im.vi(j, j) >= 1.0 - 1e-12) out.push_back(static_cast<int>(j));
  return out;
}

std::vector<RedundantPair> redundancy_pairs(const ImportanceMatrix& im, double hi,
                                            double lo) {
  if (!(0.0 <= lo && lo <= hi))
    throw std::invalid_argument("redundancy_pairs: need 0 <= lo <= hi");
  std::vector<RedundantPair> out;
  const Eigen::Index p = im.vi.rows();
  for (Eigen::Index j = 0; j < p; ++j)
    for (Eigen::Index l = j + 1; l < p; ++l)
      if (im.vi(j, j) >= hi && im.vi(l, l) >= hi && im.vi(j, l) <= lo)
        out.push_back({static_cast<int>(j), static_cast<int>(l), im.vi(j, j), im.vi(l, l),
                       im.vi(j, l)});
  std::stable_sort(out.begin(), out.end(),
                   [](const RedundantPair& a, const RedundantPair& b) {
                     return a.vi_jl < b.vi_jl;
                   });
  return out;
}

}  // namespace bsel
