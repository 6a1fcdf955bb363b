#pragma once

#include <vector>

#include "spectral/field.hpp"

namespace kgeft {

// Time-derivative jets of a field at a fixed time: jets[k] = d^k/dt^k, physical space.
class JetField {
 public:
  JetField() = default;
  explicit JetField(std::vector<Field> jets);

  int order() const { return static_cast<int>(jets_.size()) - 1; }
  const Field& operator[](int k) const { return jets_.at(static_cast<std::size_t>(k)); }
  const std::vector<Field>& jets() const { return jets_; }
  const GridSpec& grid() const { return jets_.front().grid(); }

  JetField truncated(int order) const;
  JetField with(Field next) const;  // appends one more jet

 private:
  std::vector<Field> jets_;
};

// Leibniz product, order min(a, b), dealiased pointwise products.
JetField jet_multiply(const JetField& a, const JetField& b);
JetField jet_add(const JetField& a, const JetField& b);
JetField jet_scale(Complex c, const JetField& a);
// (box F)_k = -F_{k+2} + Lap F_k, order reduced by 2.
JetField jet_box(const JetField& f);
// Jets of the Lorentzian product da.db = -a_t b_t + grad a . grad b, order min - 1.
JetField jet_lorentz_dot(const JetField& a, const JetField& b);

}  // namespace kgeft
