#pragma once

// Plain-text menu and schedule files.
//
// Menu file:
//
//   # comment lines start with '#'
//   kind=HL                 HL | CVU | BINS
//   domain=PAYOFF           PAYOFF | PRICE
//   endowment=15            PRICE only (USD)
//   sell_price=1            PRICE only (USD per widget)
//   row_index,prob_a_hi,a_hi,a_lo,prob_b_hi,b_hi,b_lo
//   1,0.1,12,9.6,0.1,23.1,0.6
//   ...
//
// PRICE menus use the header row_index,prob_a_hi,a_hi_price,a_lo_price,
// prob_b_hi,b_hi_price,b_lo_price, where *_hi_price is the buy price of the
// high-payoff outcome. A certain CVU option repeats its amount in both columns
// with prob_a_hi=1. BINS rows leave the three b columns empty.
//
// CVU schedule file:            BINS schedule file:
//   certain=14.43,14.10,...       low=0.60,1.53,...
//   lottery_b=0.5:20,0.5:2        anchor_high=23.10
//                                 terminal_r=2.0        (optional)
//                                 money_decimals=2      (optional, "none" disables)

#include <filesystem>
#include <string>
#include <string_view>

#include "mplab/menu.hpp"

namespace mplab {

std::string write_menu(const TaskMenu& menu);
TaskMenu read_menu(std::string_view text);  // ParseError carries the line number

TaskMenu load_menu_file(const std::filesystem::path& path);
void save_menu_file(const std::filesystem::path& path, const TaskMenu& menu);

std::string write_cvu_schedule(const CvuSchedule& schedule);
CvuSchedule read_cvu_schedule(std::string_view text);

std::string write_bins_schedule(const BinsSchedule& schedule);
BinsSchedule read_bins_schedule(std::string_view text);

}  // namespace mplab
