#include "scc/commentary/category.hpp"

#include <algorithm>
#include <cctype>
#include <string>

namespace scc::commentary {

std::string_view to_string(Category c) noexcept {
    switch (c) {
        case Category::description: return "description";
        case Category::quality: return "quality";
        case Category::comparison: return "comparison";
        case Category::planning: return "planning";
        case Category::contexts: return "contexts";
    }
    return "?";
}

std::optional<Category> parse_category(std::string_view text) noexcept {
    std::string lower(text);
    std::transform(lower.begin(), lower.end(), lower.begin(),
                   [](unsigned char ch) { return static_cast<char>(std::tolower(ch)); });
    for (const auto c : kAllCategories) {
        if (lower == to_string(c)) return c;
    }
    return std::nullopt;
}

}  // namespace scc::commentary
