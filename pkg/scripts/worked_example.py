"""Print the 3x+1 example: the integers = 5 (mod 6) with 2-path (2, 3)."""
from dghmap import COLLATZ, enumerate_members, image_of, path, solve_structure, trajectory


def main():
    sol = solve_structure(COLLATZ, (2, 3), 5)
    print("triples:", [tuple(t) for t in sol.triples])
    print("members <= 1000:", enumerate_members(sol, 1000))
    for p in range(3):
        x = sol.member(0, p)
        print(f"p={p}: x={x} trajectory={trajectory(COLLATZ, x, 2)} path={path(COLLATZ, x, 2)} image={image_of(sol, 0, p)}")


if __name__ == "__main__":
    main()
