# -*- coding: utf-8 -*-

"""
Release check: the tag being released must match NTUCORE_VERSION.

Accepts tags with or without a leading 'v' (v0.1.0 and 0.1.0 both match 0.1.0).
"""

import argparse
import os
import re
import sys

VERSION_FILE = os.path.join(os.path.abspath(os.path.dirname(__file__)), '..', 'ntucore', 'base.py')


def read_version(path=VERSION_FILE):
    """NTUCORE_VERSION as written in ntucore/base.py (None if absent or ambiguous)"""

    with open(path, 'r', encoding='utf-8') as f:
        results = re.findall(r'^NTUCORE_VERSION = "(.*)"', f.read(), flags=re.MULTILINE)

    return results[0] if len(results) == 1 else None


def tag_matches(tag, version):
    return tag[1:] == version if tag.startswith('v') else tag == version


def main(argv=None):

    parser = argparse.ArgumentParser(description="Check a release tag against NTUCORE_VERSION")
    parser.add_argument('tag', help='Release tag, e.g. v0.1.0')

    args = parser.parse_args(argv)

    version = read_version()

    if version is None:
        print(f"Could not find a unique NTUCORE_VERSION in {VERSION_FILE}")
        return 1

    if not tag_matches(args.tag, version):
        print(f"Release tag '{args.tag}' does not match NTUCORE_VERSION '{version}'")
        return 1

    print(f"Release tag '{args.tag}' matches NTUCORE_VERSION")
    return 0


if __name__ == '__main__':
    sys.exit(main())
