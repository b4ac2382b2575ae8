#!/usr/bin/env python

import sys

from loopeval import cli

if __name__ == "__main__":
    sys.exit(cli.run(sys.argv[1:]))
