#ifndef DIGAME_CONFIG_IO_HPP
#define DIGAME_CONFIG_IO_HPP

#include <iosfwd>
#include <string>

#include "digame/game.hpp"

namespace digame {

/// Parses a game definition from the line-oriented key/value format used by
/// the bundled fixtures:
///
///   m = 3
///   n = 2
///   o = 3
///   weights = unit                    # or: distribution (default)
///   allow_unnormalized_rewards = true
///   prior = 1 1 1
///   effectiveness =
///     1 0   0
///     0 2   0.1
///     0 0   3
///   user =
///     0 1
///     1 0
///     1 0
///   dbms =
///     0 0 1
///     1 0 0
///
/// Matrix-valued keys leave the value empty and list one whitespace-separated
/// row per following line; `#` starts a comment. Omitted `prior` defaults to
/// uniform (or all ones under unit weights); omitted strategies default to
/// uniform rows; omitted `effectiveness` defaults to the identity when m == o.
GameConfig load_game(const std::string& path);
GameConfig load_game_from_stream(std::istream& in, const std::string& origin);

}  // namespace digame

#endif  // DIGAME_CONFIG_IO_HPP
