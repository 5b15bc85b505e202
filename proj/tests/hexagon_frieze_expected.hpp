#pragma once

#include <map>
#include <vector>

#include "sphfrieze/frieze.hpp"
#include "sphfrieze/rational.hpp"

// Expected entries of the order-6 Heronian frieze of the radius-7 hexagon
// over base columns 3..10, recorded independently of the construction code.
// Indices are doubled: nodes have both coordinates even, midpoints one odd.
namespace hexfig {

struct Entry {
    long I;
    long J;
    const char* value;
};

inline const std::vector<Entry>& nodes() {
    static const std::vector<Entry> v = {
        {6, 16, "74"},   {6, 18, "0"},

        {8, 14, "14"},   {8, 16, "50"},   {8, 18, "98"},   {8, 20, "0"},

        {10, 12, "26"},  {10, 14, "126"}, {10, 16, "52"},  {10, 18, "170"},
        {10, 20, "74"},  {10, 22, "0"},

        {12, 12, "0"},   {12, 14, "140"}, {12, 16, "26"},  {12, 18, "116"},
        {12, 20, "106"}, {12, 22, "26"},  {12, 24, "0"},

        {14, 14, "0"},   {14, 16, "70"},  {14, 18, "56"},  {14, 20, "14"},
        {14, 22, "126"}, {14, 24, "140"}, {14, 26, "0"},

        {16, 16, "0"},   {16, 18, "74"},  {16, 20, "50"},  {16, 22, "52"},
        {16, 24, "26"},

        {18, 18, "0"},   {18, 20, "98"},  {18, 22, "170"},

        {20, 20, "0"},
    };
    return v;
}

inline const std::vector<Entry>& midpoints() {
    static const std::vector<Entry> v = {
        {11, 12, "0"}, {10, 13, "-60"}, {9, 14, "-6"},      {8, 15, "42"},
        {7, 16, "-82"}, {6, 17, "0"},

        {12, 13, "0"}, {11, 14, "-60"}, {10, 15, "72"},     {9, 16, "-528/7"},
        {8, 17, "-82"}, {7, 18, "0"},

        {13, 14, "0"}, {12, 15, "12"},  {11, 16, "-312/7"}, {10, 17, "72/7"},
        {9, 18, "-62"}, {8, 19, "0"},

        {14, 15, "0"}, {13, 16, "12"},  {12, 17, "376/7"},  {11, 18, "-200/7"},
        {10, 19, "-62"}, {9, 20, "0"},

        {15, 16, "0"}, {14, 17, "-84"}, {13, 18, "80"},     {12, 19, "-96"},
        {11, 20, "-414/7"}, {10, 21, "0"},

        {16, 17, "0"}, {15, 18, "-84"}, {14, 19, "28"},     {13, 20, "-36"},
        {12, 21, "-414/7"}, {11, 22, "0"},

        {17, 18, "0"}, {16, 19, "-82"}, {15, 20, "42"},     {14, 21, "-6"},
        {13, 22, "-60"}, {12, 23, "0"},

        {18, 19, "0"}, {17, 20, "-82"}, {16, 21, "-528/7"}, {15, 22, "72"},
        {14, 23, "-60"}, {13, 24, "0"},

        {19, 20, "0"}, {18, 21, "-62"}, {17, 22, "72/7"},   {16, 23, "-312/7"},
        {15, 24, "12"}, {14, 25, "0"},
    };
    return v;
}

inline const std::map<long, const char*>& ne_lines() {
    static const std::map<long, const char*> m = {{8, "74"}, {9, "98"}};
    return m;
}

inline const std::map<long, const char*>& se_lines() {
    static const std::map<long, const char*> m = {
        {6, "140"}, {7, "70"}, {8, "74"}, {9, "98"}, {10, "74"}, {11, "26"}, {12, "140"},
    };
    return m;
}

}  // namespace hexfig
