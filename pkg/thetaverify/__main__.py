# Copyright (c) 2026, the thetaverify authors
# All rights reserved.
#
# Use of this source code is governed by the BSD 3-clause license found in
# the LICENSE file at the root of this repository.


"""
This module sets up and runs the command-line-interface for thetaverify.

It receives the command and options from the user and passes it to model/perform_command.py.
"""

import argparse
import logging
import sys


class ThetaVerify(object):
    """Class that handles the command-line interface."""

    thetaverify_description = "thetaverify builds hyperelliptic curves, their period matrices, theta functions, prime forms and Szego kernels, and checks addition formulas for theta functions of split bundles, the multicomponent KP determinant identity and the identities of unramified double covers at high precision."
    thetaverify_epilog = "One positional command is required, followed by it's specific arguments (if any). To see arguments for a specific command: python -m thetaverify COMMAND -h (i.e. python -m thetaverify verify -h)."

    help_messages = {
        'describe': 'Prints the plan of a run configuration without evaluating any identity.',
        'verify': 'Runs the suites of a run configuration and writes the JSON report.',
        'version': 'Display the thetaverify version.'}

    def __init__(self):
        """Initializes the command-line interface."""
        self.parser = argparse.ArgumentParser(
            description=self.thetaverify_description,
            epilog=self.thetaverify_epilog)
        self.subparsers = self.parser.add_subparsers(dest='command')
        self.args = None

        self._add_commands()

    def add_common_properties_to_command(self, parser, runs=True):
        """
        Adds the common arguments each command shares.

        @param ArgumentParser parser: The top-level positional command to add the shared arguments to.
        @param boolean        runs:   If this command reads a run configuration and accepts its overrides.
        """
        self._add_output_group(parser)

        if runs:
            self._add_config_argument(parser)
            self._add_output_argument(parser)
            self._add_seed_argument(parser)
            self._add_suites_argument(parser)
            self._add_tol_argument(parser)

    def run(self):
        """Parse user input and execute the requested functionality; returns the exit code."""
        self.args = self.parser.parse_args()
        if self.args.command is None:
            self.parser.print_help()
            return 2

        if self.args.verbose:
            logging.basicConfig(level=logging.DEBUG, format='%(asctime)s %(name)s %(levelname)s %(message)s')

        from .model.perform_command import PerformCommand
        perform_command = PerformCommand()

        perform_command.log(self.args, self.help_messages[self.args.command])
        return getattr(perform_command, self.args.command)(self.args)

    def _add_commands(self):
        """
        Split up the functionality of thetaverify into multiple sub-commands.

        :param Object subparsers: https://docs.python.org/3/library/argparse.html#sub-commands.
        """
        self._add_describe_command()
        self._add_verify_command()
        self._add_version_command()

    # The top-level positional commands of our command-line interface.

    def _add_describe_command(self):
        describe_parser = self.subparsers.add_parser(
            'describe', help=self.help_messages['describe'])
        self.add_common_properties_to_command(describe_parser)

    def _add_verify_command(self):
        verify_parser = self.subparsers.add_parser(
            'verify', help=self.help_messages['verify'])
        self.add_common_properties_to_command(verify_parser)

    def _add_version_command(self):
        version_parser = self.subparsers.add_parser(
            'version', help=self.help_messages['version'])
        self.add_common_properties_to_command(version_parser, runs=False)

    # Mutually exclusive groups. argparse will make sure only one of the
    # arguments in a mutually exclusive group was present on the command-line.

    def _add_output_group(self, parser):
        output_group = parser.add_mutually_exclusive_group()
        self._add_quiet_argument(output_group)
        self._add_verbose_argument(output_group)

    # The add_argument helper functions. They define how a single command-line
    # argument should be parsed. These are all options.

    def _add_config_argument(self, parser):
        parser.add_argument(
            'config',
            metavar='CONFIG',
            help='The run configuration file (JSON or key = value lines).')

    def _add_output_argument(self, parser):
        parser.add_argument(
            '-o',
            '--output',
            metavar='PATH',
            help='Write the JSON report to PATH, overriding the output key of the configuration.')

    def _add_quiet_argument(self, parser):
        parser.add_argument(
            '-q',
            '--quiet',
            action='store_true',
            help='Nothing will be printed to terminal during the operation.')

    def _add_seed_argument(self, parser):
        parser.add_argument(
            '-s',
            '--seed',
            type=int,
            help='Overrides the seed of the configuration.')

    def _add_suites_argument(self, parser):
        parser.add_argument(
            '--suites',
            metavar='LIST',
            help='Comma separated suites to run instead of the configured ones: fay, szego, detcmp, kp, covering, properties.')

    def _add_tol_argument(self, parser):
        parser.add_argument(
            '-t',
            '--tol',
            type=float,
            help='Overrides the identity tolerance of the configuration.')

    def _add_verbose_argument(self, parser):
        parser.add_argument(
            '-v',
            '--verbose',
            action='store_true',
            help='Log the diagnostics of the numerical model (quadrature nodes, theta radii, resamples).')


def main():
    """
    Set up a command line interface using the argparse module.

    Above we will define what arguments our program requires and argparse will figure out how to parse those from sys.argv.
    For info on argparse see: https://docs.python.org/3/library/argparse.html.
    """
    cli = ThetaVerify()
    sys.exit(cli.run())


if __name__ == '__main__':
    main()
