"""Correct one error of magnitude at most 4 with the length-7 code over Z_48."""

from b1sets import BSet, build_code, decode, encode, syndrome

code, table = build_code(BSet(48, (1, 5, 8, 9, 39, 43, 47)))

c = (5, 3, 2, 3, 1, 1, 1)
y = (5, 3, 2, 3, 3, 1, 1)  # +2 at position 4
print("syndrome of c:", syndrome(code, c))
print("syndrome of y:", syndrome(code, y))
out = decode(code, table, y)
print(out.status, out.word, "error", out.error)

# systematic encoding puts the check symbol where b = 1 sits
word = encode(code, (10, 20, 30, 40, 0, 7))
print("encoded:", word, "syndrome", syndrome(code, word))
