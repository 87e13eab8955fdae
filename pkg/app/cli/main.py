'''
Module for collecting the CLI commands.

Created on 19-10-2026
@author: Harry New

'''
from app.cli.commands.annotate import annotate_command
from app.cli.commands.benchmark import benchmark_command
from app.cli.commands.ingest import ingest_command
from app.cli.commands.report import report_command
from app.cli.commands.tune import tune_command

# - - - - - - - - - - - - - - - - - - -

commands = [ingest_command, annotate_command, tune_command, benchmark_command, report_command]
