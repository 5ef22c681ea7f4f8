#pragma once

#include "tre/opbank.hpp"

#include <optional>
#include <string>

namespace tre {

/// Structured path edit distilled from execution experience.
struct PathEdit {
    enum class Kind { reorder, remove_duplicate, insert, remap };
    enum class Position { front, back, before_kind, after_kind };

    Kind kind = Kind::reorder;
    OperatorKind first = OperatorKind::filter;  // reorder: first before second;
    OperatorKind second = OperatorKind::agg;    // remove/insert: `first`
    Position position = Position::back;         // insert only
    OperatorKind anchor = OperatorKind::agg;    // insert before/after this kind
    std::string old_descriptor;                 // remap only
    std::string new_descriptor;

    bool operator==(const PathEdit&) const = default;
};

/// Value-agnostic lesson keyed by query signature; the optional edit makes it
/// mechanically applicable to candidate paths.
struct ExperienceNote {
    std::string pattern; // query-signature key
    std::string lesson;
    std::optional<PathEdit> edit;

    bool operator==(const ExperienceNote&) const = default;
};

/// True when `path` exhibits the note's anti-pattern (the situation the
/// lesson argues against): reorder -> second appears before first; remove ->
/// duplicated kind; insert -> kind missing; remap -> old descriptor in use.
bool note_flags_path(const ExperienceNote& note, const Path& path);

/// Canonical one-line rendering ("reorder FILTER before AGG", …) shared by
/// the mock provider and the note parser.
std::string render_lesson(const PathEdit& edit);
std::optional<PathEdit> parse_lesson(std::string_view lesson);

} // namespace tre
