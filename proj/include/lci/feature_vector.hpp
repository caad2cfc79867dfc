#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "lci/types.hpp"

namespace lci {

// Fixed, ordered feature enumeration for one dataset kind. The straight
// schema has 243 slots, the ramp schema 264; docs/FORMATS.md documents the
// layout. Instances are process-wide singletons; order never changes within
// a run.
class FeatureSchema {
 public:
  static const FeatureSchema& straight();
  static const FeatureSchema& ramp();
  static const FeatureSchema& for_kind(DatasetKind kind);

  DatasetKind kind() const { return kind_; }
  std::size_t size() const { return names_.size(); }
  const std::string& name(std::size_t i) const { return names_[i]; }
  const std::vector<std::string>& names() const { return names_; }

  // Index of a named slot; throws Error{SchemaMismatch} when unknown.
  std::size_t index(const std::string& name) const;

 private:
  explicit FeatureSchema(DatasetKind kind);

  DatasetKind kind_;
  std::vector<std::string> names_;
};

// Dense value vector over a schema with an explicit per-slot missing mask.
// Present values are always finite; missing slots carry no value (NaN never
// appears).
class FeatureVector {
 public:
  FeatureVector() : schema_(nullptr) {}
  explicit FeatureVector(const FeatureSchema& schema);

  const FeatureSchema* schema() const { return schema_; }
  std::size_t size() const { return values_.size(); }

  void set(std::size_t i, double value);
  void set_missing(std::size_t i);

  bool present(std::size_t i) const { return mask_[i] != 0; }
  double value(std::size_t i) const { return values_[i]; }

  const std::vector<double>& values() const { return values_; }
  const std::vector<std::uint8_t>& mask() const { return mask_; }

 private:
  const FeatureSchema* schema_;
  std::vector<double> values_;
  std::vector<std::uint8_t> mask_;
};

}  // namespace lci
