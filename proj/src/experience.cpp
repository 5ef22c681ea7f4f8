#include "tre/experience.hpp"

#include "tre/error.hpp"

#include <format>
#include <sstream>

namespace tre {

bool note_flags_path(const ExperienceNote& note, const Path& path) {
    if (!note.edit.has_value()) {
        return false;
    }
    const PathEdit& edit = *note.edit;
    switch (edit.kind) {
    case PathEdit::Kind::reorder: {
        // Violated when some `second` precedes a later `first`.
        for (std::size_t i = 0; i < path.ops.size(); ++i) {
            if (path.ops[i].kind != edit.second) {
                continue;
            }
            for (std::size_t j = i + 1; j < path.ops.size(); ++j) {
                if (path.ops[j].kind == edit.first) {
                    return true;
                }
            }
        }
        return false;
    }
    case PathEdit::Kind::remove_duplicate: {
        int count = 0;
        for (const OperatorInstance& op : path.ops) {
            if (op.kind == edit.first) {
                ++count;
            }
        }
        return count >= 2;
    }
    case PathEdit::Kind::insert: {
        for (const OperatorInstance& op : path.ops) {
            if (op.kind == edit.first) {
                return false;
            }
        }
        return true;
    }
    case PathEdit::Kind::remap: {
        for (const OperatorInstance& op : path.ops) {
            for (const std::string* descriptor : op.descriptor_params()) {
                if (*descriptor == edit.old_descriptor) {
                    return true;
                }
            }
        }
        return false;
    }
    }
    return false;
}

std::string render_lesson(const PathEdit& edit) {
    switch (edit.kind) {
    case PathEdit::Kind::reorder:
        return std::format("reorder {} before {}", to_string(edit.first), to_string(edit.second));
    case PathEdit::Kind::remove_duplicate:
        return std::format("remove duplicate {}", to_string(edit.first));
    case PathEdit::Kind::insert:
        switch (edit.position) {
        case PathEdit::Position::front:
            return std::format("insert {} at start", to_string(edit.first));
        case PathEdit::Position::back:
            return std::format("insert {} at end", to_string(edit.first));
        case PathEdit::Position::before_kind:
            return std::format("insert {} before {}", to_string(edit.first),
                               to_string(edit.anchor));
        case PathEdit::Position::after_kind:
            return std::format("insert {} after {}", to_string(edit.first),
                               to_string(edit.anchor));
        }
        return "";
    case PathEdit::Kind::remap:
        return std::format("remap {} -> {}", edit.old_descriptor, edit.new_descriptor);
    }
    return "";
}

std::optional<PathEdit> parse_lesson(std::string_view lesson) {
    std::istringstream in{std::string(lesson)};
    std::string word;
    if (!(in >> word)) {
        return std::nullopt;
    }
    try {
        if (word == "reorder") {
            std::string first, before, second;
            if (in >> first >> before >> second && before == "before") {
                PathEdit edit;
                edit.kind = PathEdit::Kind::reorder;
                edit.first = operator_kind_from(first);
                edit.second = operator_kind_from(second);
                return edit;
            }
        } else if (word == "remove") {
            std::string duplicate, kind;
            if (in >> duplicate >> kind && duplicate == "duplicate") {
                PathEdit edit;
                edit.kind = PathEdit::Kind::remove_duplicate;
                edit.first = operator_kind_from(kind);
                return edit;
            }
        } else if (word == "insert") {
            std::string kind, where, anchor;
            if (in >> kind >> where) {
                PathEdit edit;
                edit.kind = PathEdit::Kind::insert;
                edit.first = operator_kind_from(kind);
                if (where == "at" && in >> anchor) {
                    edit.position = anchor == "start" ? PathEdit::Position::front
                                                      : PathEdit::Position::back;
                    return edit;
                }
                if ((where == "before" || where == "after") && in >> anchor) {
                    edit.position = where == "before" ? PathEdit::Position::before_kind
                                                      : PathEdit::Position::after_kind;
                    edit.anchor = operator_kind_from(anchor);
                    return edit;
                }
            }
        } else if (word == "remap") {
            std::string old_d, arrow, new_d;
            if (in >> old_d >> arrow >> new_d && arrow == "->") {
                PathEdit edit;
                edit.kind = PathEdit::Kind::remap;
                edit.old_descriptor = old_d;
                edit.new_descriptor = new_d;
                return edit;
            }
        }
    } catch (const Error&) {
        return std::nullopt;
    }
    return std::nullopt;
}

} // namespace tre
