#pragma once

#include <array>
#include <optional>
#include <string_view>

namespace scc::commentary {

enum class Category { description, quality, comparison, planning, contexts };

inline constexpr std::array<Category, 5> kAllCategories = {Category::description, Category::quality,
                                                           Category::comparison, Category::planning,
                                                           Category::contexts};

std::string_view to_string(Category c) noexcept;
/// Case-insensitive; "general" and unknown labels give nullopt.
std::optional<Category> parse_category(std::string_view text) noexcept;

/// Categories whose context is a list of choices read by the multi-choices encoder.
constexpr bool uses_choices(Category c) noexcept {
    return c == Category::comparison || c == Category::planning || c == Category::contexts;
}

}  // namespace scc::commentary
