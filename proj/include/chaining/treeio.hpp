#pragma once

#include <string>

#include "chaining/rounding.hpp"

namespace chaining {

// JSON serialization for the certificate trees. Doubles are emitted as
// shortest round-trip decimals, so serialize(parse(s)) == s and re-scored
// values are bit-identical.
std::string labelled_to_json(const LabelledNet& net);
LabelledNet labelled_from_json(const std::string& text);

std::string chaining_to_json(const ChainingTree& tree);
ChainingTree chaining_from_json(const std::string& text);

std::string packing_to_json(const PackingTree& tree);
PackingTree packing_from_json(const std::string& text);

std::string admissible_to_json(const AdmissibleNet& anet);
AdmissibleNet admissible_from_json(const std::string& text);

// DOT views: nodes carry (label, |V|), chaining edges carry (p, l).
std::string labelled_to_dot(const LabelledNet& net);
std::string packing_to_dot(const PackingTree& tree);
std::string chaining_to_dot(const ChainingTree& tree, const MetricSpace& X);

}  // namespace chaining
