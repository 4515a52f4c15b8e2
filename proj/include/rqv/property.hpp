#pragma once

#include <optional>
#include <string>
#include <string_view>

namespace rqv {

enum class QueryKind { prob_reach, prob_bounded_until, reward_reach };
enum class Comparison { le, lt, ge, gt };

const char* to_string(Comparison cmp);
bool compare(double value, Comparison cmp, double bound);

struct Threshold {
    Comparison cmp = Comparison::le;
    double bound = 0.0;
    bool operator==(const Threshold&) const = default;
};

/// One query of the supported CSL fragment:
///   P ~p [ F "b" ], P ~p [ F<=t "b" ], P ~p [ "a" U "b" ], P ~p [ "a" U<=t "b" ],
///   R{"r"} ~x [ F "b" ]
/// where ~p is either a comparison against a number or "=?".
/// A missing guard means "true".
struct Property {
    QueryKind kind = QueryKind::prob_reach;
    std::string target;
    std::optional<std::string> guard;
    std::optional<double> time_bound;
    std::string reward_name;
    std::optional<Threshold> threshold;

    bool operator==(const Property&) const = default;
};

/// Throws ParseError whose where() is "offset <n>" (0-based byte offset).
Property parse_property(std::string_view text);

/// Canonical text, e.g. `P<=0.05 [ F "damage" ]`. Parsing it yields an equal Property.
std::string to_string(const Property& property);

}  // namespace rqv
