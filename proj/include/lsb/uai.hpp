#ifndef LSB_UAI_HPP
#define LSB_UAI_HPP

#include <iosfwd>
#include <string>

#include "lsb/factor_graph.hpp"

namespace lsb {

// UAI model text format: whitespace-separated tokens, `#` starts a comment
// running to end of line. Preamble is the type token (MARKOV or BAYES),
// variable count, per-variable cardinalities, factor count and scopes;
// factor tables follow as probabilities and are stored in log domain
// (zero probabilities become -inf).
FactorGraphModel parse_uai(const std::string& path);
FactorGraphModel parse_uai_text(const std::string& text, const std::string& source = "<string>");

void serialize_uai(const FactorGraphModel& model, std::ostream& out);
std::string serialize_uai(const FactorGraphModel& model);

}  // namespace lsb

#endif  // LSB_UAI_HPP
