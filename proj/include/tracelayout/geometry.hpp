#pragma once

#include <cmath>
#include <string_view>

namespace tracelayout
{

// Screen coordinates: x grows to the east, y grows to the south.
struct Point
{
    double x = 0.0;
    double y = 0.0;

    friend Point operator+(Point a, Point b) { return {a.x + b.x, a.y + b.y}; }
    friend Point operator-(Point a, Point b) { return {a.x - b.x, a.y - b.y}; }
    friend Point operator*(Point a, double s) { return {a.x * s, a.y * s}; }
    friend Point operator*(double s, Point a) { return {a.x * s, a.y * s}; }
    friend bool operator==(Point a, Point b) = default;
};

struct Size
{
    double width = 0.0;
    double height = 0.0;

    friend bool operator==(Size a, Size b) = default;
};

struct Rect
{
    double x = 0.0;
    double y = 0.0;
    double width = 0.0;
    double height = 0.0;

    double left() const { return x; }
    double right() const { return x + width; }
    double top() const { return y; }
    double bottom() const { return y + height; }
    Point center() const { return {x + width / 2.0, y + height / 2.0}; }
    bool has_area() const { return width > 0.0 && height > 0.0; }

    // Closed containment with a small tolerance for rounded coordinates.
    bool contains(Point p, double eps = 1e-6) const
    {
        return p.x >= left() - eps && p.x <= right() + eps && p.y >= top() - eps &&
               p.y <= bottom() + eps;
    }

    friend bool operator==(const Rect& a, const Rect& b) = default;
};

enum class Direction
{
    North,
    South,
    East,
    West
};

inline Point unit(Direction d)
{
    switch (d)
    {
        case Direction::North: return {0.0, -1.0};
        case Direction::South: return {0.0, 1.0};
        case Direction::East: return {1.0, 0.0};
        case Direction::West: return {-1.0, 0.0};
    }
    return {};
}

inline Direction opposite(Direction d)
{
    switch (d)
    {
        case Direction::North: return Direction::South;
        case Direction::South: return Direction::North;
        case Direction::East: return Direction::West;
        case Direction::West: return Direction::East;
    }
    return d;
}

inline Direction clockwise(Direction d)
{
    switch (d)
    {
        case Direction::North: return Direction::East;
        case Direction::East: return Direction::South;
        case Direction::South: return Direction::West;
        case Direction::West: return Direction::North;
    }
    return d;
}

inline bool is_horizontal(Direction d) { return d == Direction::East || d == Direction::West; }

inline bool same_axis(Direction a, Direction b) { return is_horizontal(a) == is_horizontal(b); }

char direction_letter(Direction d);

// Rounds to the 0.01 px grid used for every emitted coordinate; never yields -0.
inline double round_coord(double v)
{
    double r = std::round(v * 100.0) / 100.0;
    return r == 0.0 ? 0.0 : r;
}

inline Point round_point(Point p) { return {round_coord(p.x), round_coord(p.y)}; }

inline double distance(Point a, Point b) { return std::hypot(a.x - b.x, a.y - b.y); }

}  // namespace tracelayout
