"""Convert classic 2BP class files into the plain-text instance format.

A class file holds consecutive instance blocks, each line carrying values
followed by a label:

     1  PROBLEM CLASS
    20  N. OF ITEMS
     1     1  RELATIVE AND ABSOLUTE N. OF INSTANCE
    10    10  HBIN,WBIN
     3     7  H(I),W(I),I=1,...,N
    ...

Every block becomes <out>/class_<cc>/cl<cc>_<n>_<k>.txt with one unlimited bin
type and identical items merged into a single type with a demand.
"""
import argparse
import glob
import logging
import os
import re
import sys
from collections import Counter
from typing import List, NamedTuple, Tuple

from config import ensure_dir, setup_logging
from errors import InstanceParseError

logger = logging.getLogger(__name__)

_NUMBER = re.compile(r"^-?\d+$")


class ClassInstance(NamedTuple):
    problem_class: int
    relative: int
    bin_width: int
    bin_height: int
    items: List[Tuple[int, int]]


def _numbers(line):
    values = []
    for token in line.split():
        if not _NUMBER.match(token):
            break
        values.append(int(token))
    return values


def parse_class_file(text):
    """Instance blocks of one class file, in file order"""
    rows = [(number, _numbers(line)) for number, line in enumerate(text.splitlines(), start=1)]
    rows = [(number, values) for number, values in rows if values]
    instances = []
    position = 0

    def take(count, what):
        nonlocal position
        if position >= len(rows):
            raise InstanceParseError(f"unexpected end of file, expected {what}", len(text.splitlines()) or 1, 1)
        number, values = rows[position]
        if len(values) < count:
            raise InstanceParseError(f"expected {count} value(s) for {what}", number, 1)
        position += 1
        return values[:count]

    while position < len(rows):
        (problem_class,) = take(1, "problem class")
        (n,) = take(1, "number of items")
        relative, _ = take(2, "instance numbers")
        bin_height, bin_width = take(2, "bin height and width")
        items = []
        for _ in range(n):
            height, width = take(2, "item height and width")
            items.append((width, height))
        instances.append(ClassInstance(problem_class, relative, bin_width, bin_height, items))
    return instances


def to_text(instance):
    demand = Counter(instance.items)
    lines = [
        f"# class {instance.problem_class}, {len(instance.items)} items, instance {instance.relative}",
        "1",
        f"{instance.bin_width} {instance.bin_height} 0",
        str(len(demand)),
    ]
    # first appearance order keeps item type ids stable
    seen = []
    for size in instance.items:
        if size not in seen:
            seen.append(size)
    lines.extend(f"{w} {h} {demand[(w, h)]}" for w, h in seen)
    return "\n".join(lines) + "\n"


def convert_file(path, out_dir):
    with open(path, "r", encoding="utf-8") as f:
        instances = parse_class_file(f.read())
    written = []
    for instance in instances:
        directory = ensure_dir(os.path.join(out_dir, f"class_{instance.problem_class:02d}"))
        name = f"cl{instance.problem_class:02d}_{len(instance.items):03d}_{instance.relative:02d}.txt"
        target = os.path.join(directory, name)
        with open(target, "w", encoding="utf-8") as f:
            f.write(to_text(instance))
        written.append(target)
    logger.info(f"Converted {len(written)} instance(s) from {path}")
    return written


def main(argv=None):
    parser = argparse.ArgumentParser(description="Convert classic 2BP class files to the plain-text instance format")
    parser.add_argument("inputs", nargs="+", help="class files or directories holding them")
    parser.add_argument("--out-dir", required=True)
    args = parser.parse_args(argv)
    setup_logging("INFO", progress=False)

    paths = []
    for entry in args.inputs:
        if os.path.isdir(entry):
            paths.extend(sorted(glob.glob(os.path.join(entry, "*"))))
        else:
            paths.append(entry)

    total = 0
    for path in paths:
        try:
            total += len(convert_file(path, args.out_dir))
        except (OSError, UnicodeDecodeError, InstanceParseError) as e:
            logger.error(f"Skipping {path}: {e}")
    logger.info(f"Wrote {total} instance file(s) to {args.out_dir}")
    return 0 if total else 2


if __name__ == "__main__":
    sys.exit(main())
