// Feature slots: per-pair similarity features for the classifier, with
// optional joins through another relation's key and a policy for values
// that fail to resolve.
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "core/instance.h"
#include "core/schema.h"
#include "core/similarity.h"

namespace erblox {

enum class SlotPolicy { SkipPair, Substitute, Zero };

SlotPolicy parse_slot_policy(const std::string& name);
std::string slot_policy_name(SlotPolicy policy);

// "Rel.Attr" reads the record's own attribute; "Rel.Attr -> Other.Attr"
// treats the attribute as a reference to Other's key and reads Other.Attr.
struct FeaturePath {
  std::string attr;
  std::string join_relation;  // empty when the path has no join
  std::string join_attr;
  bool has_join() const { return !join_relation.empty(); }
};

struct FeatureSlot {
  std::string relation;  // the classified relation
  FeaturePath primary;
  std::optional<FeaturePath> fallback;  // tried per record when primary fails
  Kernel kernel = Kernel::TfIdfCosine;
  SlotPolicy policy = SlotPolicy::SkipPair;

  std::string label() const;  // e.g. "Paper.CID->Conference.FName"
};

// Resolves slot values per record (primary, else fallback when present) and
// applies the kernel. A slot's df table spans every target column the slot
// can resolve through. When a record resolves through neither path: Zero
// scores the slot 0.0, SkipPair and Substitute drop the pair. Substitute
// differs from SkipPair only in requiring a fallback path.
class FeatureExtractor {
public:
  FeatureExtractor(const Schema& schema, const Instance& instance,
                   std::vector<FeatureSlot> slots, const std::string& relation);

  size_t dim() const { return prepared_.size(); }
  const std::vector<FeatureSlot>& slots() const { return slots_; }

  // Feature vector for a record pair, or nullopt when a slot skips the pair
  // (skip_reason names the slot if given). Unknown rids are an error.
  std::optional<std::vector<double>> vector_for(int64_t rid1, int64_t rid2,
                                                std::string* skip_reason = nullptr) const;

private:
  struct PreparedPath {
    size_t attr_idx = 0;
    const RelationInstance* join = nullptr;  // null when the path has no join
    size_t join_attr_idx = 0;
  };
  struct PreparedSlot {
    PreparedPath primary;
    std::optional<PreparedPath> fallback;
    DfTable df;
  };

  std::optional<Value> resolve(const PreparedPath& path, const Record& rec) const;

  const Instance& instance_;
  std::string relation_;
  std::vector<FeatureSlot> slots_;
  std::vector<PreparedSlot> prepared_;
};

}  // namespace erblox
