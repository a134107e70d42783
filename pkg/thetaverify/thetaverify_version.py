# Copyright (c) 2026, the thetaverify authors
# All rights reserved.
#
# Use of this source code is governed by the BSD 3-clause license found in
# the LICENSE file at the root of this repository.

"""
Version definition for thetaverify.

"""

THETAVERIFY_VERSION = "0.1.0"
