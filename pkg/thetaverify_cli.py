# Copyright (c) 2026, the thetaverify authors
# All rights reserved.
#
# Use of this source code is governed by the BSD 3-clause license found in
# the LICENSE file at the root of this repository.


"""
This module is located outside the thetaverify package and allows PyInstaller to properly build thetaverify into an executable by running $ pyinstaller thetaverify_cli.py --clean --name thetaverify

Users can also call the thetaverify command-line-tool from Python by running $ python thetaverify_cli.py --help
"""

from thetaverify.__main__ import main


if __name__ == '__main__':
    main()
