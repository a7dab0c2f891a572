"""Create experiment runs table

Revision ID: 3f1c2b9d8e41
Revises: 
Create Date: 2026-10-19 12:00:00.000000

"""
from typing import Sequence, Union

from alembic import op
import sqlalchemy as sa


# revision identifiers, used by Alembic.
revision: str = '3f1c2b9d8e41'
down_revision: Union[str, None] = None
branch_labels: Union[str, Sequence[str], None] = None
depends_on: Union[str, Sequence[str], None] = None


def upgrade() -> None:
    """Upgrade schema."""
    op.create_table('experiment_runs',
    sa.Column('id', sa.Integer(), nullable=False),
    sa.Column('experiment', sa.String(), nullable=False),
    sa.Column('master_seed', sa.Integer(), nullable=False),
    sa.Column('created_at', sa.DateTime(), nullable=False),
    sa.Column('passed', sa.Boolean(), nullable=True),
    sa.Column('config', sa.JSON(), nullable=False),
    sa.Column('summary', sa.JSON(), nullable=False),
    sa.PrimaryKeyConstraint('id')
    )
    op.create_index(op.f('ix_experiment_runs_id'), 'experiment_runs', ['id'], unique=False)
    op.create_index(op.f('ix_experiment_runs_experiment'), 'experiment_runs', ['experiment'], unique=False)


def downgrade() -> None:
    """Downgrade schema."""
    op.drop_index(op.f('ix_experiment_runs_experiment'), table_name='experiment_runs')
    op.drop_index(op.f('ix_experiment_runs_id'), table_name='experiment_runs')
    op.drop_table('experiment_runs')
