import click
from dotenv import load_dotenv
from flask.cli import FlaskGroup

load_dotenv()

from stablesim import create_app  # noqa: E402


@click.group(cls=FlaskGroup, create_app=create_app, add_default_commands=False)
def cli():
    """stablesim: simulation and verification of indicator fractional stable motions"""


if __name__ == '__main__':
    cli()
